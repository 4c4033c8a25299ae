#include "homcalc/driver.hpp"

int main(int argc, char** argv) { return homcalc::run_cli(argc, argv); }
