#include "nemalab/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace nemalab {

static_assert(std::endian::native == std::endian::little, "field snapshots assume a little-endian host");

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_field(const std::filesystem::path& path, const RealField& field) {
  const Grid& g = field.grid();
  nlohmann::json header = {
      {"format", "nemalab-field"},
      {"version", 1},
      {"dim", g.dim()},
      {"sizes", std::vector<int>(g.sizes().begin(), g.sizes().begin() + g.dim())},
      {"periods", std::vector<double>(g.periods().begin(), g.periods().begin() + g.dim())},
      {"role", to_string(field.role())},
      {"encoding", "f64le"},
      {"count", field.size()},
  };
  std::string blob = header.dump();
  blob.push_back('\n');
  const std::size_t offset = blob.size();
  blob.resize(offset + field.size() * sizeof(double));
  std::memcpy(blob.data() + offset, field.values().data(), field.size() * sizeof(double));
  write_file_atomic(path, blob);
}

RealField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open field snapshot " + path.string());
  std::string line;
  std::getline(in, line);
  const auto header = nlohmann::json::parse(line);
  if (header.value("format", "") != "nemalab-field") throw std::runtime_error(path.string() + ": not a nemalab field snapshot");
  if (header.value("encoding", "") != "f64le") throw std::runtime_error(path.string() + ": unsupported encoding");

  const int dim = header.at("dim");
  std::array<int, 3> sizes{1, 1, 1};
  std::array<double, 3> periods{1.0, 1.0, 1.0};
  for (int a = 0; a < dim; ++a) {
    sizes[a] = header.at("sizes").at(a);
    periods[a] = header.at("periods").at(a);
  }
  Grid grid(dim, sizes, periods);
  const std::size_t count = header.at("count");
  if (count != grid.point_count()) throw std::runtime_error(path.string() + ": count does not match grid");
  std::vector<double> values(count);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
    throw std::runtime_error(path.string() + ": truncated payload");
  return RealField(grid, std::move(values), role_from_string(header.at("role")));
}

}  // namespace nemalab
