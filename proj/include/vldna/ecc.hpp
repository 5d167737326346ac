#pragma once

#include <array>
#include <cstring>

#include "vldna/common.hpp"

namespace vldna {

// ---------------------------------------------------------------------------
// Reed-Solomon(255,239) over GF(2^8), primitive polynomial x^8+x^4+x^3+x^2+1.
// 16 parity bytes per 239 data bytes; corrects up to 8 byte errors per
// codeword. Applied to the digital data before base encoding.
// ---------------------------------------------------------------------------

namespace gf256 {

struct Tables {
    std::array<u8, 512> exp{};
    std::array<u8, 256> log{};
    Tables() {
        u16 x = 1;
        for (int i = 0; i < 255; i++) {
            exp[i] = static_cast<u8>(x);
            log[x] = static_cast<u8>(i);
            x <<= 1;
            if (x & 0x100) x ^= 0x11d;
        }
        for (int i = 255; i < 512; i++) exp[i] = exp[i - 255];
        log[0] = 0;
    }
};

inline const Tables& tables() {
    static const Tables t;
    return t;
}

inline u8 mul(u8 a, u8 b) {
    if (!a || !b) return 0;
    const Tables& t = tables();
    return t.exp[t.log[a] + t.log[b]];
}

inline u8 div(u8 a, u8 b) {
    if (!a) return 0;
    const Tables& t = tables();
    return t.exp[(t.log[a] + 255 - t.log[b]) % 255];
}

inline u8 pow_alpha(int e) {
    return tables().exp[((e % 255) + 255) % 255];
}

inline u8 inv(u8 a) { return tables().exp[255 - tables().log[a]]; }

} // namespace gf256

class ReedSolomon {
public:
    static constexpr int kCodewordLen = 255;
    static constexpr int kDataLen = 239;
    static constexpr int kParityLen = 16;
    static constexpr int kMaxErrors = kParityLen / 2;

    ReedSolomon() {
        // generator polynomial: prod_{i=0}^{15} (x - alpha^i)
        gen_.fill(0);
        gen_[0] = 1;
        for (int i = 0; i < kParityLen; i++) {
            u8 root = gf256::pow_alpha(i);
            for (int j = i + 1; j > 0; j--)
                gen_[j] = static_cast<u8>(gen_[j - 1] ^ gf256::mul(gen_[j], root));
            gen_[0] = gf256::mul(gen_[0], root);
        }
    }

    // data must be exactly 239 bytes; returns 255-byte codeword (data || parity).
    void encode_block(const u8* data, u8* codeword) const {
        std::memcpy(codeword, data, kDataLen);
        u8 lfsr[kParityLen] = {};
        for (int i = 0; i < kDataLen; i++) {
            u8 feedback = static_cast<u8>(data[i] ^ lfsr[kParityLen - 1]);
            for (int j = kParityLen - 1; j > 0; j--)
                lfsr[j] = static_cast<u8>(lfsr[j - 1] ^ gf256::mul(gen_[j], feedback));
            lfsr[0] = gf256::mul(gen_[0], feedback);
        }
        for (int i = 0; i < kParityLen; i++)
            codeword[kDataLen + i] = lfsr[kParityLen - 1 - i];
    }

    // Corrects up to 8 byte errors in place; returns number of corrections,
    // or -1 if the codeword is uncorrectable.
    int decode_block(u8* codeword) const {
        // Syndromes. Codeword poly has highest-degree coefficient first.
        u8 synd[kParityLen];
        bool clean = true;
        for (int i = 0; i < kParityLen; i++) {
            u8 a = gf256::pow_alpha(i);
            u8 s = 0;
            for (int j = 0; j < kCodewordLen; j++)
                s = static_cast<u8>(gf256::mul(s, a) ^ codeword[j]);
            synd[i] = s;
            if (s) clean = false;
        }
        if (clean) return 0;

        // Berlekamp-Massey for the error locator polynomial.
        u8 sigma[kParityLen + 1] = {1};
        u8 prev[kParityLen + 1] = {1};
        int L = 0, m = 1;
        u8 b = 1;
        for (int n = 0; n < kParityLen; n++) {
            u8 d = synd[n];
            for (int i = 1; i <= L; i++) d ^= gf256::mul(sigma[i], synd[n - i]);
            if (d == 0) {
                m++;
            } else if (2 * L <= n) {
                u8 t[kParityLen + 1];
                std::memcpy(t, sigma, sizeof(t));
                u8 coef = gf256::div(d, b);
                for (int i = 0; i + m <= kParityLen; i++)
                    sigma[i + m] ^= gf256::mul(coef, prev[i]);
                L = n + 1 - L;
                std::memcpy(prev, t, sizeof(t));
                b = d;
                m = 1;
            } else {
                u8 coef = gf256::div(d, b);
                for (int i = 0; i + m <= kParityLen; i++)
                    sigma[i + m] ^= gf256::mul(coef, prev[i]);
                m++;
            }
        }
        if (L > kMaxErrors) return -1;

        // Chien search: sigma's roots are X_e^{-1}, X_e = alpha^{254-pos}.
        int positions[kMaxErrors];
        int nerr = 0;
        for (int j = 0; j < kCodewordLen; j++) {
            u8 xinv = gf256::pow_alpha(-(kCodewordLen - 1 - j));
            u8 v = 0;
            for (int i = L; i >= 0; i--) v = static_cast<u8>(gf256::mul(v, xinv) ^ sigma[i]);
            if (v == 0) {
                if (nerr >= kMaxErrors) return -1;
                positions[nerr++] = j;
            }
        }
        if (nerr != L) return -1;

        // Forney: omega = (synd * sigma) mod x^16;
        // Y_e = X_e * omega(X_e^{-1}) / sigma'(X_e^{-1}).
        u8 omega[kParityLen] = {};
        for (int i = 0; i < kParityLen; i++) {
            u8 acc = 0;
            for (int j = 0; j <= i && j <= L; j++)
                acc ^= gf256::mul(sigma[j], synd[i - j]);
            omega[i] = acc;
        }
        for (int e = 0; e < nerr; e++) {
            int pos = positions[e];
            u8 x = gf256::pow_alpha(kCodewordLen - 1 - pos);
            u8 xinv = gf256::inv(x);
            u8 num = 0;
            for (int i = kParityLen - 1; i >= 0; i--)
                num = static_cast<u8>(gf256::mul(num, xinv) ^ omega[i]);
            u8 xinv2 = gf256::mul(xinv, xinv);
            u8 den = 0, xpow = 1;
            for (int i = 1; i <= L; i += 2) {
                den ^= gf256::mul(sigma[i], xpow);
                xpow = gf256::mul(xpow, xinv2);
            }
            if (den == 0) return -1;
            codeword[pos] ^= gf256::mul(x, gf256::div(num, den));
        }

        // verify
        for (int i = 0; i < kParityLen; i++) {
            u8 a = gf256::pow_alpha(i);
            u8 s = 0;
            for (int j = 0; j < kCodewordLen; j++)
                s = static_cast<u8>(gf256::mul(s, a) ^ codeword[j]);
            if (s) return -1;
        }
        return nerr;
    }

private:
    std::array<u8, kParityLen + 1> gen_;
};

inline const ReedSolomon& reed_solomon() {
    static const ReedSolomon rs;
    return rs;
}

// ---------------------------------------------------------------------------
// Stream framing: zero-pad the final short block to 239 bytes, encode each
// block, then append a 4-byte little-endian trailer holding the pad length.
// ---------------------------------------------------------------------------

inline Bytes ecc_encode(const Bytes& data) {
    const ReedSolomon& rs = reed_solomon();
    std::size_t blocks = (data.size() + ReedSolomon::kDataLen - 1) / ReedSolomon::kDataLen;
    u32 pad = static_cast<u32>(blocks * ReedSolomon::kDataLen - data.size());
    Bytes out(blocks * ReedSolomon::kCodewordLen + 4);
    Bytes block(ReedSolomon::kDataLen);
    for (std::size_t b = 0; b < blocks; b++) {
        std::size_t off = b * ReedSolomon::kDataLen;
        std::size_t take = std::min<std::size_t>(ReedSolomon::kDataLen, data.size() - off);
        std::fill(block.begin(), block.end(), 0);
        std::copy(data.begin() + off, data.begin() + off + take, block.begin());
        rs.encode_block(block.data(), out.data() + b * ReedSolomon::kCodewordLen);
    }
    for (int i = 0; i < 4; i++)
        out[blocks * ReedSolomon::kCodewordLen + i] = static_cast<u8>(pad >> (8 * i));
    return out;
}

inline Bytes ecc_decode(const Bytes& stream) {
    if (stream.size() < 4 || (stream.size() - 4) % ReedSolomon::kCodewordLen != 0)
        throw InvalidCodeword("ecc stream length " + std::to_string(stream.size()) +
                              " is not k*255+4");
    const ReedSolomon& rs = reed_solomon();
    std::size_t blocks = (stream.size() - 4) / ReedSolomon::kCodewordLen;
    u32 pad = 0;
    for (int i = 0; i < 4; i++)
        pad |= static_cast<u32>(stream[blocks * ReedSolomon::kCodewordLen + i]) << (8 * i);
    if (pad > blocks * ReedSolomon::kDataLen)
        throw InvalidCodeword("ecc trailer pad exceeds stream");
    Bytes out;
    out.reserve(blocks * ReedSolomon::kDataLen);
    Bytes cw(ReedSolomon::kCodewordLen);
    for (std::size_t b = 0; b < blocks; b++) {
        std::copy(stream.begin() + b * ReedSolomon::kCodewordLen,
                  stream.begin() + (b + 1) * ReedSolomon::kCodewordLen, cw.begin());
        if (rs.decode_block(cw.data()) < 0)
            throw InvalidCodeword("uncorrectable codeword at block " + std::to_string(b));
        out.insert(out.end(), cw.begin(), cw.begin() + ReedSolomon::kDataLen);
    }
    out.resize(out.size() - pad);
    return out;
}

} // namespace vldna
