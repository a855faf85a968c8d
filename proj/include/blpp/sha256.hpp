#pragma once

#include <cstdint>
#include <string>

namespace blpp {

// Minimal SHA-256, used for the content digests recorded in run manifests.
class Sha256 {
public:
    Sha256();
    void update(const void* data, size_t len);
    std::string hex_digest(); // finalizes

    static std::string of_string(const std::string& s);
    static std::string of_file(const std::string& path); // throws on IO failure

private:
    void process_block(const uint8_t* block);
    uint32_t state_[8];
    uint64_t bit_count_ = 0;
    uint8_t buffer_[64];
    size_t buffered_ = 0;
};

} // namespace blpp
