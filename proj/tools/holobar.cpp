#include <cstdio>

int main() {
  std::puts("holobar: placeholder");
  return 0;
}
