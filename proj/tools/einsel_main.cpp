#include "einsel/experiments.hpp"

int main(int argc, char** argv) { return einsel::main_entry(argc, argv); }
