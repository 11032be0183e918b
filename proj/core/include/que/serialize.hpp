#pragma once

// Versioned JSON documents (levelgraph/1, pencil/1, que-cert/1) and the binary
// eigendecomposition cache format.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "que/certifier.hpp"

namespace que {

struct SpectralDecomposition;

/// Optional reproducibility stamp embedded as {"provenance": {...}}.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t value);

/// Documents are dumped with two-space indentation and sorted keys.
std::string to_json(const LevelGraph& graph, const std::optional<Provenance>& prov = std::nullopt);
std::string to_json(const FormPencil& pencil, const std::optional<Provenance>& prov = std::nullopt);
std::string to_json(const QueCertificate& cert, const std::optional<Provenance>& prov = std::nullopt);

/// Throw Validation on a wrong schema or malformed document.
LevelGraph level_graph_from_json(std::string_view text);
FormPencil pencil_from_json(std::string_view text);
QueCertificate certificate_from_json(std::string_view text);

/// Hash of the pencil entries, used to reject stale cache files.
std::uint64_t pencil_fingerprint(const FormPencil& pencil);

void write_decomposition(const std::filesystem::path& file, const SpectralDecomposition& d,
                         std::uint64_t fingerprint);
/// nullopt when the file is missing, truncated, or was written for another pencil.
std::optional<SpectralDecomposition> read_decomposition(const std::filesystem::path& file,
                                                        std::uint64_t fingerprint);

}  // namespace que
