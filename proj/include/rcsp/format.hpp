#pragma once

// Line-oriented text formats. '#' starts a comment; blank lines are ignored.
//
//   csp <n> <d> <k>                  instance header
//   dist <d> <k>                     distribution header
//   t <id> <num_restrictions>        template block (ids 1..T, in order)
//   r <v1> ... <vk>                  one restriction of the preceding block
//   c <var1> ... <vark> <template>   constraint (instances only)
//   u <var> <allowed values...>      domain line (instances only, optional)
//   p <template> <num> <den>         template probability (distributions only)

#include <iosfwd>
#include <string>
#include <string_view>

#include "rcsp/model.hpp"

namespace rcsp {

std::string emit_instance(const CspInstance& instance, std::string_view header_comment = {});
CspInstance parse_instance(std::string_view text);

std::string emit_distribution(const ConstraintDistribution& dist, std::string_view header_comment = {});
ConstraintDistribution parse_distribution(std::string_view text);

/// Whole-file helpers; throw InvalidInput when the file cannot be read or written.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace rcsp
