#pragma once

#include <ostream>
#include <string>

#include "jetscope/grid.hpp"

namespace jetscope {

enum class FieldFormat { Text, Binary };

FieldFormat parse_format(const std::string& text);

/// Text: a `# jetscope-field v1 dim=<n> shape=<...> box=<...>` header line then
/// one value per line. Binary: float64 little-endian values with a sidecar
/// `<path>.json` header carrying the same metadata.
SampledField read_field(const std::string& path, FieldFormat format);
void write_field(const SampledField& field, const std::string& path, FieldFormat format);
void write_field_text(const SampledField& field, std::ostream& out);

std::string field_header(const Grid& grid);
Grid parse_field_header(const std::string& line);

}  // namespace jetscope
