#include <cstdio>

int main() {
  std::puts("germlab: under construction");
  return 0;
}
