#include "harmo/hgf_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "harmo/error.hpp"

namespace harmo {
namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* key) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find(',', pos);
    if (end == std::string::npos) end = s.size();
    const std::string tok = s.substr(pos, end - pos);
    T v{};
    auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size())
      fail(ErrorCode::Format, std::string("bad value '") + tok + "' for " + key);
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

std::uint64_t to_le(std::uint64_t u) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((u >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return u;
}

}  // namespace

std::string hgf_header(const TensorField& f) {
  const GridSpec& g = f.grid();
  if (g.topology() == Topology::Mixed) fail(ErrorCode::Format, "HGF-1 cannot represent mixed topology");
  std::ostringstream os;
  os << "HGF1 dim=" << g.dim() << " shape=";
  for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << g.shape()[a];
  os << " spacing=";
  for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << fmt_double(g.spacing()[a]);
  os << " topology=" << (g.topology() == Topology::Torus ? "torus" : "box");
  if (f.values() > 1)
    os << " rank=0," << f.values();
  else
    os << " rank=" << f.cov() << "," << f.contra();
  os << " origin=";
  for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << fmt_double(g.origin()[a]);
  return os.str();
}

void write_hgf(std::ostream& os, const TensorField& f) {
  if (f.values() > 1 && (f.cov() || f.contra()))
    fail(ErrorCode::Format, "HGF-1 stores either a tensor or an R^d-valued field");
  os << hgf_header(f) << '\n';
  for (double v : f.data()) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    u = to_le(u);
    os.write(reinterpret_cast<const char*>(&u), 8);
  }
  if (!os) fail(ErrorCode::Format, "write failed");
}

void write_hgf(const std::string& path, const TensorField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Config, "cannot open " + path + " for writing");
  write_hgf(os, f);
}

TensorField read_hgf(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::Format, "missing header");
  std::istringstream hs(line);
  std::string magic;
  hs >> magic;
  if (magic != "HGF1") fail(ErrorCode::Format, "bad magic '" + magic + "'");
  std::map<std::string, std::string> kv;
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Format, "bad header token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  for (const char* k : {"dim", "shape", "spacing", "topology", "rank", "origin"})
    if (!kv.count(k)) fail(ErrorCode::Format, std::string("header lacks ") + k);
  const int n = parse_list<int>(kv["dim"], "dim").at(0);
  auto shape = parse_list<int>(kv["shape"], "shape");
  auto spacing = parse_list<double>(kv["spacing"], "spacing");
  auto origin = parse_list<double>(kv["origin"], "origin");
  auto rank = parse_list<int>(kv["rank"], "rank");
  if (n < 1 || static_cast<int>(shape.size()) != n || static_cast<int>(spacing.size()) != n ||
      static_cast<int>(origin.size()) != n || rank.size() != 2)
    fail(ErrorCode::Format, "inconsistent header lengths");
  const std::string topo = kv["topology"];
  if (topo != "torus" && topo != "box") fail(ErrorCode::Format, "unknown topology '" + topo + "'");
  GridSpec g(shape, spacing, std::vector<bool>(n, topo == "torus"), origin);

  std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() % 8 != 0 || bytes.size() / 8 % g.size() != 0)
    fail(ErrorCode::Format, "payload size does not match grid");
  const int per_node = static_cast<int>(bytes.size() / 8 / g.size());
  TensorField f;
  if (per_node == ipow(n, rank[0] + rank[1]))
    f = TensorField(g, rank[0], rank[1]);
  else if (rank[0] == 0 && per_node == rank[1])
    f = TensorField(g, 0, 0, rank[1]);
  else
    fail(ErrorCode::Format, "payload has " + std::to_string(per_node) + " components per node, rank tag disagrees");
  for (std::size_t i = 0; i < f.data().size(); ++i) {
    std::uint64_t u;
    std::memcpy(&u, bytes.data() + 8 * i, 8);
    u = to_le(u);
    std::memcpy(&f.data()[i], &u, 8);
  }
  return f;
}

TensorField read_hgf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Config, "cannot open " + path);
  return read_hgf(is);
}

}  // namespace harmo
