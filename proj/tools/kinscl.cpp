#include "kinscl/app.hpp"

int main(int argc, char** argv) { return kinscl::run_cli(argc, argv); }
