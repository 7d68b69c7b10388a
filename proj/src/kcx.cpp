#include "krylovlab/kcx.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "krylovlab/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "KCX I/O writes native byte order and requires a little-endian host");

namespace krylovlab::kcx {

namespace {

constexpr char kMagic[4] = {'K', 'C', 'X', '1'};

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Cursor {
 public:
  Cursor(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T get(const char* what) {
    if (pos_ + sizeof(T) > size_)
      throw FormatError(std::string("truncated ") + what, pos_);
    T v;
    std::memcpy(&v, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  const std::uint8_t* bytes(std::size_t n, const char* what) {
    if (pos_ + n > size_) throw FormatError(std::string("truncated ") + what, pos_);
    const std::uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == size_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

void atomic_write(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + tmp + "' for writing", 0);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("short write to '" + tmp + "'", 0);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw FormatError("rename '" + tmp + "' -> '" + path + "' failed: " + ec.message(), 0);
}

}  // namespace

void write_container(const std::string& path, const std::string& header_json,
                     const std::vector<Section>& sections) {
  std::string out;
  out.append(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, header_json.size());
  out.append(header_json);
  for (const auto& s : sections) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.tag.size()));
    out.append(s.tag);
    put<std::uint64_t>(out, s.payload.size());
    out.append(reinterpret_cast<const char*>(s.payload.data()), s.payload.size());
  }
  atomic_write(path, out);
}

ReadResult read_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'", 0);
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  Cursor cur(raw.data(), raw.size());

  const std::uint8_t* magic = cur.bytes(4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic (expected KCX1)", 0);
  const auto version = cur.get<std::uint32_t>("version");
  if (version != kVersion)
    throw FormatError("unsupported version " + std::to_string(version), 4);
  const auto hlen = cur.get<std::uint64_t>("header length");
  const std::size_t hpos = cur.pos();
  const std::uint8_t* hdr = cur.bytes(static_cast<std::size_t>(hlen), "header");

  ReadResult result;
  result.header_json.assign(reinterpret_cast<const char*>(hdr), static_cast<std::size_t>(hlen));
  if (!nlohmann::json::accept(result.header_json))
    throw FormatError("header is not valid JSON", hpos);

  while (!cur.done()) {
    const std::size_t tag_at = cur.pos();
    const auto tlen = cur.get<std::uint32_t>("section tag length");
    if (tlen == 0 || tlen > 256) throw FormatError("implausible section tag length", tag_at);
    const std::uint8_t* tag = cur.bytes(tlen, "section tag");
    Section s;
    s.tag.assign(reinterpret_cast<const char*>(tag), tlen);
    const auto plen = cur.get<std::uint64_t>("section payload length");
    const std::uint8_t* payload = cur.bytes(static_cast<std::size_t>(plen), "section payload");
    s.payload.assign(payload, payload + plen);
    result.sections.push_back(std::move(s));
  }
  return result;
}

void write_ensemble(const std::string& path, const GueEnsemble& ensemble) {
  const int n = ensemble.n;
  const std::size_t m = ensemble.samples.size();
  nlohmann::json header = {
      {"kind", "ensemble"}, {"n", n},      {"m", m},
      {"seed", ensemble.seed},             {"dtype", "f64"},
      {"sections", {"ENSEMBLE"}},
  };
  Section sec;
  sec.tag = "ENSEMBLE";
  sec.payload.resize(m * static_cast<std::size_t>(n) * n * 2 * sizeof(double));
  std::uint8_t* p = sec.payload.data();
  for (const auto& s : ensemble.samples) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double re = s.h(i, j).real(), im = s.h(i, j).imag();
        std::memcpy(p, &re, sizeof(double));
        std::memcpy(p + sizeof(double), &im, sizeof(double));
        p += 2 * sizeof(double);
      }
  }
  write_container(path, header.dump(), {std::move(sec)});
}

GueEnsemble read_ensemble(const std::string& path) {
  ReadResult rr = read_container(path);
  const auto header = nlohmann::json::parse(rr.header_json);
  if (header.value("kind", "") != "ensemble")
    throw FormatError("'" + path + "' is not an ensemble container", 0);
  GueEnsemble ens;
  ens.n = header.at("n").get<int>();
  ens.seed = header.at("seed").get<std::uint64_t>();
  const auto m = header.at("m").get<std::size_t>();

  const Section* sec = nullptr;
  for (const auto& s : rr.sections)
    if (s.tag == "ENSEMBLE") sec = &s;
  if (!sec) throw FormatError("missing ENSEMBLE section", 0);
  const std::size_t want = m * static_cast<std::size_t>(ens.n) * ens.n * 2 * sizeof(double);
  if (sec->payload.size() != want)
    throw FormatError("ENSEMBLE payload size mismatch", sec->payload.size());

  ens.samples.resize(m);
  const std::uint8_t* p = sec->payload.data();
  for (std::size_t s = 0; s < m; ++s) {
    ComplexMatrix h(ens.n, ens.n);
    for (int i = 0; i < ens.n; ++i)
      for (int j = 0; j < ens.n; ++j) {
        double re, im;
        std::memcpy(&re, p, sizeof(double));
        std::memcpy(&im, p + sizeof(double), sizeof(double));
        p += 2 * sizeof(double);
        h(i, j) = {re, im};
      }
    ens.samples[s].h = std::move(h);
  }
  return ens;
}

}  // namespace krylovlab::kcx
