#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dlab/errors.hpp"
#include "dlab/intset.hpp"

namespace dlab {

/// Set file format: UTF-8 text, one decimal integer per line, lines starting
/// with '#' ignored, blank lines skipped, duplicates deduplicated on load.
inline IntSet read_intset(std::istream& in, const std::string& origin = "<stream>") {
    std::vector<std::int64_t> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t");
        const std::string token = line.substr(b, e - b + 1);
        if (token[0] == '#') continue;
        std::int64_t v = 0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
            throw ParseError(origin + ":" + std::to_string(lineno) +
                             ": cannot parse integer from '" + token + "'");
        values.push_back(v);
    }
    return IntSet(std::move(values));
}

inline IntSet load_intset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open set file '" + path + "'");
    return read_intset(in, path);
}

inline void write_intset(std::ostream& out, const IntSet& s) {
    for (std::int64_t v : s) out << v << '\n';
}

inline void save_intset(const std::string& path, const IntSet& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_intset(out, s);
}

}  // namespace dlab
