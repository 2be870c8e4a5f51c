#include <stdio.h>
#include <string.h>

#include "anterial.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  const char *json =
      "{\"nodes\":[\"1\",\"2\",\"3\"],\"edges\":["
      "{\"u\":\"1\",\"v\":\"2\",\"type\":\"-->\"},"
      "{\"u\":\"2\",\"v\":\"3\",\"type\":\"-->\"}]}";
  AnterialGraph *g = NULL;
  CHECK(anterial_graph_from_json(json, &g) == ANTERIAL_STATUS_OK);
  CHECK(anterial_graph_node_count(g) == 3);

  const char *a[] = {"1"}, *b[] = {"3"}, *z[] = {"2"};
  bool sep = false;
  CHECK(anterial_separated(g, a, 1, b, 1, z, 1, &sep) == ANTERIAL_STATUS_OK);
  CHECK(sep);
  CHECK(anterial_separated(g, a, 1, b, 1, NULL, 0, &sep) == ANTERIAL_STATUS_OK);
  CHECK(!sep);

  AnterialGraph *m = NULL;
  CHECK(anterial_graph_apply(g, ANTERIAL_OP_MARGINALIZE, z, 1, &m) == ANTERIAL_STATUS_OK);
  char *out = NULL;
  CHECK(anterial_graph_to_json(m, &out) == ANTERIAL_STATUS_OK);
  CHECK(strstr(out, "\"-->\"") != NULL);
  anterial_string_free(out);
  anterial_graph_free(m);

  const char *missing[] = {"9"};
  CHECK(anterial_graph_apply(g, ANTERIAL_OP_CONDITION, missing, 1, &m) == ANTERIAL_STATUS_UNKNOWN_NODE);
  CHECK(strstr(anterial_last_error(), "9") != NULL);

  CHECK(anterial_graph_from_json("{", &m) == ANTERIAL_STATUS_PARSE);
  anterial_graph_free(g);
  puts("ok");
  return 0;
}
