#include "esrad/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "esrad/config.hpp"

namespace esrad {

std::string format_g9(double v) {
    if (v == 0.0)
        v = 0.0; // normalize -0
    char buf[48];
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    // snprintf honors the C numeric locale; the CLI pins it to "C".
    return buf;
}

static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> parse_key_value_text(const std::string& text,
                                                        const std::string& origin) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        out[key] = val;
    }
    return out;
}

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_key_value_text(ss.str(), path);
}

std::vector<double> parse_grid(const std::string& spec) {
    std::string body = spec;
    bool log = false;
    if (body.size() >= 3 && body.substr(body.size() - 3) == "log") {
        log = true;
        body = body.substr(0, body.size() - 3);
    } else if (body.size() >= 3 && body.substr(body.size() - 3) == "lin") {
        body = body.substr(0, body.size() - 3);
    }
    const auto c1 = body.find(':');
    const auto c2 = body.find(':', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("bad grid spec '" + spec + "' (want start:stop:points[log|lin])");
    double start, stop;
    long points;
    try {
        start = std::stod(body.substr(0, c1));
        stop = std::stod(body.substr(c1 + 1, c2 - c1 - 1));
        points = std::stol(body.substr(c2 + 1));
    } catch (const std::exception&) {
        throw ConfigError("bad grid spec '" + spec + "'");
    }
    if (points < 1)
        throw ConfigError("grid needs at least 1 point: '" + spec + "'");
    if (log && (start <= 0.0 || stop <= 0.0))
        throw ConfigError("log grid requires positive endpoints: '" + spec + "'");

    std::vector<double> grid;
    grid.reserve(points);
    if (points == 1) {
        grid.push_back(start);
        return grid;
    }
    for (long i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        grid.push_back(log ? start * std::pow(stop / start, t)
                           : start + (stop - start) * t);
    }
    return grid;
}

} // namespace esrad
