#include <cstdio>

int main() {
  std::puts("spingeo: subcommands not wired up yet");
  return 2;
}
