#pragma once

#include <map>
#include <string>
#include <vector>

namespace esrad {

// Locale-independent formatting with 9 significant digits ('.' decimal
// separator), used for every floating-point value written by the CLI.
std::string format_g9(double v);

// Flat key=value config file; '#' starts a comment.  Later keys override
// earlier ones.  Throws ConfigError with a line diagnostic on parse errors.
std::map<std::string, std::string> parse_key_value_file(const std::string& path);
std::map<std::string, std::string> parse_key_value_text(const std::string& text,
                                                        const std::string& origin);

// Grid spec "start:stop:points" with an optional trailing "log" or "lin"
// (default lin), e.g. "0.01:100:50log".
std::vector<double> parse_grid(const std::string& spec);

} // namespace esrad
