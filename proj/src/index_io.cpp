#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "bdindex/index.hpp"
#include "crc32c.hpp"

namespace bdindex {

namespace {

constexpr char kMagic[4] = {'B', 'D', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* p, std::size_t len) {
    crc_.update(p, len);
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
    count_ += len;
  }

  void u32(std::uint32_t x) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
    bytes(b, 4);
  }

  void u64(std::uint64_t x) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
    bytes(b, 8);
  }

  void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }

  // Trailer: the CRC itself is excluded from the digest.
  void finish() {
    std::uint32_t crc = crc_.value();
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(crc >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), 4);
    count_ += 4;
    if (!out_) throw Error(ErrorKind::io_error, "write failed while serializing index");
  }

  std::uint64_t count() const { return count_; }

 private:
  std::ostream& out_;
  detail::Crc32c crc_;
  std::uint64_t count_ = 0;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* p, std::size_t len) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(in_.gcount()) != len)
      throw Error(ErrorKind::truncated,
                  "index stream truncated: expected " + std::to_string(len) +
                      " more bytes at offset " + std::to_string(count_) + ", got " +
                      std::to_string(in_.gcount()));
    crc_.update(p, len);
    count_ += len;
  }

  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return x;
  }

  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return x;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  void check_trailer() {
    std::uint32_t computed = crc_.value();
    unsigned char b[4];
    in_.read(reinterpret_cast<char*>(b), 4);
    if (in_.gcount() != 4)
      throw Error(ErrorKind::truncated, "index stream truncated before CRC trailer");
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    if (stored != computed)
      throw Error(ErrorKind::checksum_mismatch,
                  "index checksum mismatch: stored " + std::to_string(stored) +
                      ", computed " + std::to_string(computed));
    if (in_.peek() != std::char_traits<char>::eof())
      throw Error(ErrorKind::invariant_violation, "trailing bytes after index CRC");
  }

 private:
  std::istream& in_;
  detail::Crc32c crc_;
  std::uint64_t count_ = 0;
};

[[noreturn]] void bad_payload(const std::string& what) {
  throw Error(ErrorKind::invariant_violation, "index payload invalid: " + what);
}

}  // namespace

std::uint64_t serialize_index(const BDIndex& idx, std::ostream& out) {
  const HierarchyTree& t = idx.tree();
  const vertex_t n = idx.num_vertices();
  Writer w(out);
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.u64(n);
  w.u64(t.root);
  for (vertex_t v = 0; v < n; ++v) w.u64(t.parent[v]);
  for (vertex_t v = 0; v < n; ++v) w.u64(t.dfs_start[v]);
  for (vertex_t v = 0; v < n; ++v) w.u64(t.dfs_size[v]);
  for (vertex_t v = 0; v < n; ++v) w.u64(idx.label_offset(v));
  for (vertex_t v = 0; v < n; ++v) w.f64(idx.label_f(v));
  for (double x : idx.values()) w.f64(x);
  for (vertex_t v = 0; v < n; ++v) {
    const std::string& s = idx.id_map()[v];
    w.u32(static_cast<std::uint32_t>(s.size()));
    w.bytes(s.data(), s.size());
  }
  w.finish();
  return w.count();
}

BDIndex deserialize_index(std::istream& in) {
  Reader r(in);

  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw Error(ErrorKind::bad_format, "not an index file (bad magic)");
  std::uint32_t version = r.u32();
  if (version != kVersion)
    throw Error(ErrorKind::bad_format,
                "unsupported index version " + std::to_string(version));

  std::uint64_t n64 = r.u64();
  if (n64 == 0) bad_payload("zero vertices");
  if (n64 >= std::numeric_limits<vertex_t>::max()) bad_payload("vertex count too large");
  const vertex_t n = static_cast<vertex_t>(n64);
  std::uint64_t root = r.u64();
  if (root >= n) bad_payload("root id out of range");

  BDIndex idx;
  HierarchyTree& t = idx.tree_;
  t.root = static_cast<vertex_t>(root);
  t.parent.resize(n);
  for (vertex_t v = 0; v < n; ++v) {
    std::uint64_t p = r.u64();
    if (p >= n) bad_payload("parent id out of range");
    t.parent[v] = static_cast<vertex_t>(p);
  }
  t.dfs_start.resize(n);
  for (vertex_t v = 0; v < n; ++v) {
    std::uint64_t s = r.u64();
    if (s >= n) bad_payload("dfs_start out of range");
    t.dfs_start[v] = static_cast<std::uint32_t>(s);
  }
  t.dfs_size.resize(n);
  for (vertex_t v = 0; v < n; ++v) {
    std::uint64_t s = r.u64();
    if (s == 0 || s > n) bad_payload("dfs_size out of range");
    t.dfs_size[v] = static_cast<std::uint32_t>(s);
  }

  // Rebuild order / dfs_pos / children from the stored arrays.
  t.dfs_pos = t.dfs_start;
  t.order.assign(n, kNoVertex);
  for (vertex_t v = 0; v < n; ++v) {
    if (t.order[t.dfs_start[v]] != kNoVertex) bad_payload("dfs_start values collide");
    t.order[t.dfs_start[v]] = v;
  }
  t.children.assign(n, {});
  for (vertex_t v = 0; v < n; ++v)
    if (v != t.root) t.children[t.parent[v]].push_back(v);

  idx.offset_.resize(n);
  std::uint64_t expect = 0;
  bool offsets_ok = true;
  std::vector<std::uint64_t> raw(n);
  for (vertex_t v = 0; v < n; ++v) raw[v] = r.u64();
  for (vertex_t i = 0; i < n; ++i) {
    vertex_t v = t.order[i];
    if (raw[v] != expect) offsets_ok = false;
    idx.offset_[v] = raw[v];
    expect += t.dfs_size[v];
  }
  if (!offsets_ok) bad_payload("label offsets are not the DFS prefix sums");

  idx.f_.resize(n);
  for (vertex_t v = 0; v < n; ++v) idx.f_[v] = r.f64();
  for (vertex_t v = 0; v < n; ++v)
    if (v != t.root && !(idx.f_[v] > 0.0))
      bad_payload("non-root f must be positive (vertex " + std::to_string(v) + ")");

  idx.values_.resize(expect);
  for (std::uint64_t i = 0; i < expect; ++i) idx.values_[i] = r.f64();
  for (vertex_t v = 0; v < n; ++v)
    if (idx.values_[idx.offset_[v]] != 1.0)
      bad_payload("label of vertex " + std::to_string(v) + " does not start with 1");

  idx.id_map_.resize(n);
  for (vertex_t v = 0; v < n; ++v) {
    std::uint32_t len = r.u32();
    std::string s(len, '\0');
    if (len) r.bytes(s.data(), len);
    idx.id_map_[v] = std::move(s);
  }

  r.check_trailer();

  if (auto bad = validate_tree_structure(t))
    throw Error(ErrorKind::invariant_violation, "index payload invalid: " + *bad);
  idx.rebuild_lookup();
  if (idx.label_lookup_.size() != n) bad_payload("duplicate labels in id map");
  return idx;
}

std::uint64_t save_index(const BDIndex& idx, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot open '" + path + "' for writing");
  std::uint64_t bytes = serialize_index(idx, out);
  out.flush();
  if (!out) throw Error(ErrorKind::io_error, "write failed for '" + path + "'");
  return bytes;
}

BDIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path + "'");
  return deserialize_index(in);
}

}  // namespace bdindex
