#include "detection_model.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace abft::model {

DetectionEstimate detect_prob_error_in_B(FaultModel model, std::uint64_t m) {
    if (m < 1) throw std::invalid_argument("detect_prob_error_in_B: m must be >= 1");
    const double dm = static_cast<double>(m);
    if (model == FaultModel::single_bit_flip)
        return {1.0 - std::pow(3.0 / 256.0, dm), false};
    return {1.0 - std::pow(1018.0 / 32640.0, dm), true};
}

DetectionEstimate detect_prob_error_in_C(FaultModel model) {
    if (model == FaultModel::single_bit_flip) return {1.0, false};
    return {1.0 - 1.0 / 127.0, true};
}

double encode_overhead(EncodedSide side, std::uint64_t m, std::uint64_t n, std::uint64_t k) {
    if (m < 1 || n < 1 || k < 1) throw std::invalid_argument("encode_overhead: zero dimension");
    const double dm = static_cast<double>(m), dn = static_cast<double>(n),
                 dk = static_cast<double>(k);
    if (side == EncodedSide::A) return 1.0 / (2.0 * dn) + 1.0 / dm + 1.0 / (2.0 * dk);
    return 1.0 / (2.0 * dm) + 1.0 / dn + 1.0 / (2.0 * dk);
}

double eb_overhead(std::uint64_t m, std::uint64_t d) {
    if (m < 1 || d < 1) throw std::invalid_argument("eb_overhead: zero argument");
    return 1.0 / static_cast<double>(d) + 1.0 / (3.0 * static_cast<double>(m));
}

double eb_memory_overhead(std::uint64_t p, std::uint64_t d) {
    if (p < 1 || d < 1) throw std::invalid_argument("eb_memory_overhead: zero argument");
    return 32.0 / (static_cast<double>(p) * static_cast<double>(d));
}

std::uint64_t count_multiples(std::uint64_t a, std::uint64_t mod) {
    if (mod == 0) throw std::invalid_argument("count_multiples: mod must be >= 1");
    return a / mod;
}

ExactFraction oracle_undetected_fraction_B(FaultModel model) {
    ExactFraction f;
    if (model == FaultModel::single_bit_flip) {
        // All A values x all bit positions x all original B values.
        for (int a = 0; a <= 255; ++a) {
            for (int bit = 0; bit < 8; ++bit) {
                for (int orig = -128; orig <= 127; ++orig) {
                    const std::int8_t flipped =
                        static_cast<std::int8_t>(static_cast<std::uint8_t>(orig) ^ (1u << bit));
                    const long d = static_cast<long>(flipped) - orig;
                    ++f.total;
                    if (std::labs(d * a) % 127 == 0) ++f.undetected;
                }
            }
        }
    } else {
        // All (original, corrupted) signed pairs with original != corrupted,
        // times all A values.
        for (int a = 0; a <= 255; ++a) {
            for (int orig = -128; orig <= 127; ++orig) {
                for (int corrupt = -128; corrupt <= 127; ++corrupt) {
                    if (corrupt == orig) continue;
                    const long d = corrupt - orig;
                    ++f.total;
                    if (std::labs(d * a) % 127 == 0) ++f.undetected;
                }
            }
        }
    }
    return f;
}

}  // namespace abft::model
