#include "ctcnn/ctt.hpp"

#include <fstream>
#include <iterator>
#include <limits>
#include <system_error>

#include "ctcnn/bytes.hpp"

namespace ctcnn {

namespace bytes {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FilesystemError("cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw FilesystemError("read failed for " + path.string());
  return data;
}

void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& data) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FilesystemError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw FilesystemError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw FilesystemError("cannot rename into " + path.string());
  }
}

}  // namespace bytes

std::vector<std::uint8_t> encode_ctt(const Tensor& t) {
  std::vector<std::uint8_t> out{'C', 'T', 'T', '1'};
  out.reserve(8 + 4 * t.rank() + 4 * t.size());
  bytes::put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t e : t.shape()) bytes::put_u32(out, static_cast<std::uint32_t>(e));
  for (float v : t.data()) bytes::put_f32(out, v);
  return out;
}

Tensor decode_ctt(const std::vector<std::uint8_t>& buf) {
  bytes::Reader r(buf, "CTT1");
  if (r.chars(4) != "CTT1") throw FormatError("CTT1: bad magic", 0);
  const std::size_t rank_at = r.offset();
  const std::uint32_t rank = r.u32();
  if (rank < 1 || rank > 4) {
    throw FormatError("CTT1: rank must be 1..4, got " + std::to_string(rank), rank_at);
  }
  Shape shape;
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::size_t at = r.offset();
    const std::uint32_t e = r.u32();
    if (e == 0) throw FormatError("CTT1: zero extent", at);
    count *= e;
    if (count > std::numeric_limits<std::uint32_t>::max()) throw FormatError("CTT1: tensor too large", at);
    shape.push_back(e);
  }
  r.need(4 * count);
  std::vector<float> data(count);
  for (auto& v : data) v = r.f32();
  if (r.remaining() != 0) throw FormatError("CTT1: trailing bytes after payload", r.offset());
  return Tensor(std::move(shape), std::move(data));
}

void write_ctt(const std::filesystem::path& path, const Tensor& t) {
  bytes::write_file_atomic(path, encode_ctt(t));
}

Tensor read_ctt(const std::filesystem::path& path) {
  try {
    return decode_ctt(bytes::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.detail(), e.offset());
  }
}

}  // namespace ctcnn
