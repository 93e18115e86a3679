#include "ssm/commands.hpp"

int main(int argc, char** argv) { return ssm::cli::run(argc, argv); }
