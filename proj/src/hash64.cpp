#include "patcorp/hash64.hpp"

#include <cstring>

namespace patcorp {

namespace {
constexpr std::uint64_t kMul = 0xc6a4a7935bd1e995ULL;
constexpr int kShift = 47;

inline std::uint64_t load_le64(const unsigned char* p) {
    std::uint64_t v;
    std::memcpy(&v, p, 8);
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    v = __builtin_bswap64(v);
#endif
    return v;
}

inline void absorb_chunk(std::uint64_t& acc, std::uint64_t k) {
    k *= kMul;
    k ^= k >> kShift;
    k *= kMul;
    acc ^= k;
    acc *= kMul;
}
}  // namespace

void Hash64Stream::update(const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    if (!started_) {
        acc_ = seed_;
        started_ = true;
    }
    total_ += len;
    if (tail_len_ > 0) {
        while (len > 0 && tail_len_ < 8) {
            tail_[tail_len_++] = *p++;
            --len;
        }
        if (tail_len_ == 8) {
            absorb_chunk(acc_, load_le64(tail_));
            tail_len_ = 0;
        }
    }
    while (len >= 8) {
        absorb_chunk(acc_, load_le64(p));
        p += 8;
        len -= 8;
    }
    if (len > 0) {
        std::memcpy(tail_, p, len);
        tail_len_ = len;
    }
}

std::uint64_t Hash64Stream::finish() {
    if (!started_) {
        acc_ = seed_;
        started_ = true;
    }
    if (tail_len_ > 0) {
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < tail_len_; ++i)
            k |= static_cast<std::uint64_t>(tail_[i]) << (8 * i);
        acc_ ^= k;
        acc_ *= kMul;
        tail_len_ = 0;
    }
    acc_ ^= total_ * kMul;
    acc_ ^= acc_ >> kShift;
    acc_ *= kMul;
    acc_ ^= acc_ >> kShift;
    return acc_;
}

std::uint64_t hash_bytes(const void* data, std::size_t len, std::uint64_t seed) {
    Hash64Stream h(seed);
    h.update(data, len);
    return h.finish();
}

}  // namespace patcorp
