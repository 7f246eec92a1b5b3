#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace gabm {

std::array<std::uint8_t, 32> sha256(std::string_view bytes);
std::string sha256_hex(std::string_view bytes);

/// First eight bytes of SHA-256(bytes), read big-endian.
std::uint64_t digest_u64(std::string_view bytes);

/// Per-run seed: digest_u64("run-seed:<master>:<run_index>").
std::uint64_t derive_run_seed(std::uint64_t master_seed, int run_index);

} // namespace gabm
