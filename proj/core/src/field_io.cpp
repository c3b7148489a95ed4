#include "jetscope/field_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "jetscope/error.hpp"
#include "jetscope/report.hpp"

namespace jetscope {

FieldFormat parse_format(const std::string& text) {
  if (text == "text") return FieldFormat::Text;
  if (text == "bin") return FieldFormat::Binary;
  fail(ErrorCode::InvalidArgument, "unknown field format '" + text + "' (expected text or bin)");
}

namespace {

std::vector<double> parse_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size())
      fail(ErrorCode::IoError, "malformed number '" + item + "' in field header");
    out.push_back(v);
  }
  return out;
}

Grid grid_from(int dim, const std::vector<double>& shape, const std::vector<double>& box) {
  if (dim != 1 && dim != 2) fail(ErrorCode::IoError, "field dimension must be 1 or 2");
  if (static_cast<int>(shape.size()) != dim || static_cast<int>(box.size()) != 2 * dim)
    fail(ErrorCode::IoError, "field header shape/box do not match the dimension");
  std::array<int, 2> n{1, 1};
  Point lo{0.0, 0.0}, hi{0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    const double s = shape[static_cast<std::size_t>(a)];
    if (s < 2 || s != static_cast<int>(s)) fail(ErrorCode::IoError, "field shape must list integers >= 2");
    n[static_cast<std::size_t>(a)] = static_cast<int>(s);
    lo[static_cast<std::size_t>(a)] = box[static_cast<std::size_t>(2 * a)];
    hi[static_cast<std::size_t>(a)] = box[static_cast<std::size_t>(2 * a + 1)];
    if (!(hi[static_cast<std::size_t>(a)] > lo[static_cast<std::size_t>(a)]))
      fail(ErrorCode::IoError, "field box must have hi > lo");
  }
  return Grid(dim, lo, hi, n);
}

}  // namespace

std::string field_header(const Grid& grid) {
  std::ostringstream os;
  os << "# jetscope-field v1 dim=" << grid.dim() << " shape=" << grid.nodes(0);
  if (grid.dim() == 2) os << 'x' << grid.nodes(1);
  os << " box=" << format_double(grid.lo(0)) << ',' << format_double(grid.hi(0));
  if (grid.dim() == 2) os << ',' << format_double(grid.lo(1)) << ',' << format_double(grid.hi(1));
  return os.str();
}

Grid parse_field_header(const std::string& line) {
  std::stringstream ss(line);
  std::string hash, magic, version;
  ss >> hash >> magic >> version;
  if (hash != "#" || magic != "jetscope-field" || version != "v1")
    fail(ErrorCode::IoError, "missing '# jetscope-field v1' header");
  int dim = 0;
  std::vector<double> shape, box;
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) fail(ErrorCode::IoError, "malformed header token '" + tok + "'");
    const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
    if (key == "dim") {
      const auto d = parse_numbers(value, ',');
      if (d.size() != 1) fail(ErrorCode::IoError, "malformed dim");
      dim = static_cast<int>(d[0]);
    } else if (key == "shape") {
      shape = parse_numbers(value, 'x');
    } else if (key == "box") {
      box = parse_numbers(value, ',');
    } else {
      fail(ErrorCode::IoError, "unknown header key '" + key + "'");
    }
  }
  return grid_from(dim, shape, box);
}

SampledField read_field(const std::string& path, FieldFormat format) {
  if (format == FieldFormat::Text) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::IoError, "'" + path + "' is empty");
    const Grid grid = parse_field_header(line);
    std::vector<double> values;
    values.reserve(grid.size());
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (line.back() == '\r') line.pop_back();
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
      if (ec != std::errc() || ptr != line.data() + line.size())
        fail(ErrorCode::IoError, "malformed value '" + line + "' in '" + path + "'");
      values.push_back(v);
    }
    if (values.size() != grid.size())
      fail(ErrorCode::IoError, "'" + path + "' holds " + std::to_string(values.size()) + " values, header expects " +
                                   std::to_string(grid.size()));
    return SampledField(grid, std::move(values));
  }
  std::ifstream meta(path + ".json");
  if (!meta) fail(ErrorCode::IoError, "cannot open sidecar '" + path + ".json'");
  nlohmann::json header;
  try {
    meta >> header;
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, std::string("malformed sidecar header: ") + e.what());
  }
  const Grid grid = [&] {
    try {
      return grid_from(header.at("dim").get<int>(), header.at("shape").get<std::vector<double>>(),
                       header.at("box").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::IoError, std::string("sidecar header: ") + e.what());
    }
  }();
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != grid.size() * 8)
    fail(ErrorCode::IoError, "'" + path + "' size does not match the sidecar shape");
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes.data() + 8 * k, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    values[k] = std::bit_cast<double>(bits);
  }
  return SampledField(grid, std::move(values));
}

void write_field_text(const SampledField& field, std::ostream& out) {
  out << field_header(field.grid()) << '\n';
  for (double v : field.values()) out << format_double(v) << '\n';
}

void write_field(const SampledField& field, const std::string& path, FieldFormat format) {
  const Grid& g = field.grid();
  if (format == FieldFormat::Text) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    write_field_text(field, out);
    if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
    return;
  }
  nlohmann::ordered_json header;
  header["dim"] = g.dim();
  std::vector<int> shape{g.nodes(0)};
  std::vector<double> box{g.lo(0), g.hi(0)};
  if (g.dim() == 2) {
    shape.push_back(g.nodes(1));
    box.push_back(g.lo(1));
    box.push_back(g.hi(1));
  }
  header["shape"] = shape;
  header["box"] = box;
  std::ofstream meta(path + ".json");
  if (!meta) fail(ErrorCode::IoError, "cannot write '" + path + ".json'");
  meta << header.dump(2) << '\n';
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  for (double v : field.values()) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    out.write(reinterpret_cast<const char*>(&bits), 8);
  }
  if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace jetscope
