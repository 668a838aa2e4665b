#include "plc/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "plc/error.hpp"

namespace plc {
namespace {

constexpr char kMagic[4] = {'P', 'L', 'S', 'F'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw IoError("PLSF: truncated file");
  }
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_plsf(const GridField& field) {
  const GridMask& m = *field.mask;
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(1);
  out.push_back(static_cast<std::uint8_t>(m.dimension()));
  out.push_back(static_cast<std::uint8_t>(field.role));
  const auto dims = m.dims();
  for (int a = 0; a < m.dimension(); ++a) put_u64(out, dims[static_cast<std::size_t>(a)]);
  put_f64(out, m.origin().x);
  if (m.dimension() == 2) put_f64(out, m.origin().y);
  put_f64(out, m.h());
  const std::size_t nodes = m.node_count();
  std::vector<std::uint8_t> bits((nodes + 7) / 8, 0);
  for (std::size_t f = 0; f < nodes; ++f) {
    if (m.inside_node(f)) bits[f / 8] |= static_cast<std::uint8_t>(1u << (f % 8));
  }
  out.insert(out.end(), bits.begin(), bits.end());
  for (double v : field.values) put_f64(out, v);
  return out;
}

PlsfFile decode_plsf(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw IoError("PLSF: bad magic bytes");
  for (int i = 0; i < 4; ++i) r.u8();
  PlsfFile f;
  f.version = r.u8();
  if (f.version != 1) throw IoError("PLSF: unsupported version " + std::to_string(f.version));
  f.dimension = r.u8();
  if (f.dimension != 1 && f.dimension != 2) throw IoError("PLSF: bad dimension");
  f.role = role_from_tag(r.u8());
  std::uint64_t nodes = 1;
  for (int a = 0; a < f.dimension; ++a) {
    f.dims.push_back(r.u64());
    if (f.dims.back() == 0 || f.dims.back() > (std::uint64_t{1} << 31)) {
      throw IoError("PLSF: implausible grid size");
    }
    nodes *= f.dims.back();
  }
  for (int a = 0; a < f.dimension; ++a) f.origin.push_back(r.f64());
  f.h = r.f64();
  const std::size_t mask_bytes = static_cast<std::size_t>((nodes + 7) / 8);
  r.need(mask_bytes);
  f.inside.resize(static_cast<std::size_t>(nodes));
  std::size_t interior = 0;
  std::vector<std::uint8_t> bits(mask_bytes);
  for (auto& b : bits) b = r.u8();
  for (std::size_t i = 0; i < f.inside.size(); ++i) {
    f.inside[i] = (bits[i / 8] >> (i % 8)) & 1u;
    interior += f.inside[i];
  }
  if (r.remaining() != 8 * interior) {
    throw IoError("PLSF: expected " + std::to_string(interior) + " values, found " +
                  std::to_string(r.remaining()) + " trailing bytes");
  }
  f.values.resize(interior);
  for (auto& v : f.values) v = r.f64();
  return f;
}

void write_plsf(const std::filesystem::path& path, const GridField& field) {
  const auto bytes = encode_plsf(field);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

PlsfFile read_plsf(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return decode_plsf(bytes);
}

GridField bind_field(const PlsfFile& file, const ConvexDomain& domain) {
  if (file.dimension != domain.dimension()) throw IoError("PLSF: dimension does not match domain");
  auto mask = std::make_shared<const GridMask>(rasterize(domain, file.h));
  const auto dims = mask->dims();
  for (int a = 0; a < file.dimension; ++a) {
    if (file.dims[static_cast<std::size_t>(a)] != dims[static_cast<std::size_t>(a)]) {
      throw IoError("PLSF: grid dimensions do not match the domain");
    }
  }
  if (file.origin[0] != mask->origin().x ||
      (file.dimension == 2 && file.origin[1] != mask->origin().y)) {
    throw IoError("PLSF: grid origin does not match the domain");
  }
  if (file.inside != mask->inside_flags()) throw IoError("PLSF: mask does not match the domain");
  return GridField(std::move(mask), file.values, file.role);
}

GridField load_field(const std::filesystem::path& path, const ConvexDomain& domain) {
  return bind_field(read_plsf(path), domain);
}

}  // namespace plc
