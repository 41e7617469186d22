/* Plain C client of the shared library. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "rwl/rwl.h"

#define EXPECT(cond)                                        \
  do {                                                      \
    if (!(cond)) {                                          \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                             \
    }                                                       \
  } while (0)

int main(void) {
  rwl_grid* g = NULL;
  rwl_propagator* p = NULL;
  double l[4];
  size_t n, i;
  double *s, *V1, *V2, *V3, before = 0.0, after = 0.0;

  EXPECT(rwl_grid_create(3.141592653589793, 8, 8, 4, &g) == RWL_OK);
  EXPECT(rwl_eigenvalues(0.0, 0.0, 0.0, l) == RWL_OK && fabs(l[0] - 1.0) < 1e-15);
  EXPECT(rwl_propagator_create(g, 1, &p) == RWL_OK);

  n = rwl_grid_volume_size(g);
  s = calloc(n, sizeof *s);
  V1 = calloc(n, sizeof *V1);
  V2 = calloc(n, sizeof *V2);
  V3 = calloc(n, sizeof *V3);
  EXPECT(s && V1 && V2 && V3);
  for (i = 0; i < n; ++i) {
    s[i] = cos(0.1 * (double)i);
    before += s[i] * s[i];
  }
  EXPECT(rwl_propagate(p, 0.7, 0.3, s, V1, V2, V3) == RWL_OK);
  for (i = 0; i < n; ++i) after += s[i] * s[i] + V1[i] * V1[i] + V2[i] * V2[i] + V3[i] * V3[i];
  /* The symmetry projection only removes energy. */
  EXPECT(after <= before * (1.0 + 1e-12));
  EXPECT(after > 0.0);

  EXPECT(rwl_grid_create(1.0, 7, 8, 4, NULL) == RWL_ERR_INVALID_ARGUMENT);
  EXPECT(rwl_last_error()[0] != '\0');

  free(s);
  free(V1);
  free(V2);
  free(V3);
  rwl_propagator_destroy(p);
  rwl_grid_destroy(g);
  puts("c consumer ok");
  return 0;
}
