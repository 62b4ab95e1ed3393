#pragma once

#include "eds/commands.hpp"
#include "eds/parser.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace edstest {

inline std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline eds::SpecFile load_fixture(const std::string &name) {
    return eds::parse_specfile(read_file(std::string(EDS_FIXTURE_DIR) + "/" + name + ".eds"));
}

} // namespace edstest
