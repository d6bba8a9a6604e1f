#include <cstdio>
int main() { std::puts("substrate_bg"); return 0; }
