#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krylovlab/ensemble.hpp"

namespace krylovlab::kcx {

// KCX container layout, all integers and floats little-endian:
//   magic "KCX1" | u32 version | u64 header_len | UTF-8 JSON header | sections
//   section := u32 tag_len | tag | u64 payload_len | payload
// The header's "sections" array lists the tags in file order.
inline constexpr std::uint32_t kVersion = 1;

struct Section {
  std::string tag;
  std::vector<std::uint8_t> payload;
};

// Writes atomically (temp file + rename). Throws FormatError on I/O failure.
void write_container(const std::string& path, const std::string& header_json,
                     const std::vector<Section>& sections);

// Validates magic/version/lengths; throws FormatError with the byte offset
// of the first inconsistency. Never returns a partial read.
struct ReadResult {
  std::string header_json;
  std::vector<Section> sections;
};
ReadResult read_container(const std::string& path);

// Ensemble persistence: header {kind:"ensemble", n, m, seed, dtype:"f64"},
// section "ENSEMBLE" holding m row-major n x n matrices as interleaved
// (Re, Im) f64 pairs.
void write_ensemble(const std::string& path, const GueEnsemble& ensemble);
GueEnsemble read_ensemble(const std::string& path);

}  // namespace krylovlab::kcx
