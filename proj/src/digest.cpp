#include "gabm/digest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace gabm {

std::array<std::uint8_t, 32> sha256(std::string_view bytes) {
    std::array<std::uint8_t, 32> out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    return out;
}

std::string sha256_hex(std::string_view bytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    auto d = sha256(bytes);
    std::string out;
    out.reserve(64);
    for (auto b : d) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xF]);
    }
    return out;
}

std::uint64_t digest_u64(std::string_view bytes) {
    auto d = sha256(bytes);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[static_cast<std::size_t>(i)];
    return v;
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, int run_index) {
    return digest_u64("run-seed:" + std::to_string(master_seed) + ":" + std::to_string(run_index));
}

} // namespace gabm
