#pragma once

// Plain-text series files: one value per line, full double precision.
// Used by the CLI to move return series between the simulate and dfa steps.

#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmf {

inline void write_series(const std::string& path, std::span<const double> values) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    char buf[64];
    for (double v : values) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << '\n';
    }
}

inline std::vector<double> read_series(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(line, &pos);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": not a number: " + line);
        }
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' ||
                                     line[pos] == '\r')) {
            ++pos;
        }
        if (pos != line.size()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": trailing junk: " + line);
        }
        values.push_back(v);
    }
    return values;
}

}  // namespace mmf
