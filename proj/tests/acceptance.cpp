#include <iostream>
int main(int argc, char** argv) { (void)argc; (void)argv; std::cout << "acceptance placeholder\n"; return 1; }
