#include <cstdio>

#include "paleylab/paleylab.h"

int main(int argc, char** argv) {
  paleylab_session* s = paleylab_session_new();
  if (!s) {
    std::fputs("paley-lab: out of memory\n", stderr);
    return PALEYLAB_INTERNAL;
  }
  int code = paleylab_run(s, argc - 1, argv + 1);
  std::fputs(paleylab_output(s), stdout);
  const char* err = paleylab_last_error(s);
  if (*err) std::fprintf(stderr, "paley-lab: %s\n", err);
  paleylab_session_free(s);
  return code;
}
