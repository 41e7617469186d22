// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Usage: acceptance [threads]
#include <cstdio>
#include <cstdlib>

#include "rwl/rwl.h"

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : 1;
  int failed = 0;
  for (int id = 1; id <= rwl_selftest_count(); ++id) {
    int passed = 0;
    char line[1024];
    const rwl_status st = rwl_selftest_run(id, threads, &passed, line, sizeof line);
    if (st != RWL_OK) {
      std::printf("FAIL %d: %s\n", id, rwl_last_error());
      ++failed;
      continue;
    }
    std::printf("%s\n", line);
    std::fflush(stdout);
    if (!passed) ++failed;
  }
  std::printf("%d of %d criteria passed\n", rwl_selftest_count() - failed, rwl_selftest_count());
  return failed == 0 ? 0 : 1;
}
