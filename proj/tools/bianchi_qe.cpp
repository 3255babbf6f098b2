// Command line driver; subcommands are filled in as the library grows.
#include <cstdio>

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::fprintf(stderr, "not yet wired\n");
  return 2;
}
