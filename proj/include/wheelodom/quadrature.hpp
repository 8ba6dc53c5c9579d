#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "wheelodom/errors.hpp"
#include "wheelodom/types.hpp"

namespace wheelodom {

// Instantaneous levels of the two encoder channels. Forward rotation is
// defined as the Gray cycle 00 -> 01 -> 11 -> 10 -> 00 (channel B leads);
// every edge of either channel is counted (x4 decoding).
struct QuadState {
    bool a = false;
    bool b = false;

    friend bool operator==(const QuadState&, const QuadState&) = default;
};

// Position of a state within the forward Gray cycle: 00=0, 01=1, 11=2, 10=3.
inline int quad_phase(QuadState s) {
    static constexpr int phase_by_ab[4] = {0, 1, 3, 2};  // index = a*2 + b
    return phase_by_ab[(s.a ? 2 : 0) + (s.b ? 1 : 0)];
}

inline QuadState quad_state_at_phase(int phase) {
    static constexpr QuadState by_phase[4] = {{false, false}, {false, true}, {true, true}, {true, false}};
    return by_phase[((phase % 4) + 4) % 4];
}

struct QuadSample {
    std::uint64_t timestamp_us = 0;
    QuadState state;
};

// Per-wheel sampled channel levels; timestamps non-decreasing.
using QuadSampleStream = std::vector<QuadSample>;

struct CountSample {
    std::uint64_t timestamp_us = 0;
    std::int64_t count = 0;
};

// Cumulative signed count per sample; consecutive counts differ by at most 1.
using DecodedCounts = std::vector<CountSample>;

// Count contribution of one state transition: +1 along the forward cycle,
// -1 along the reverse cycle, 0 for no change. A double flip (both channels
// changed, e.g. 00 -> 11) cannot be ordered and raises IllegalTransitionError;
// sample_index is only used to report that position.
inline int decode_transition(QuadState prev, QuadState next, std::size_t sample_index = 0) {
    const int dp = (quad_phase(next) - quad_phase(prev) + 4) % 4;
    switch (dp) {
        case 0: return 0;
        case 1: return +1;
        case 3: return -1;
        default: throw IllegalTransitionError(sample_index);
    }
}

// What to do when a stream contains an illegal transition.
enum class IllegalTransitionPolicy {
    kFail,          // throw at the first illegal transition
    kSkipAndCount,  // resynchronize at the offending sample, count the event
};

struct DecodeResult {
    DecodedCounts counts;
    std::uint64_t illegal_transitions = 0;
};

// Folds a sampled A/B stream into cumulative counts starting at 0. The first
// sample establishes the reference state at count 0. Under kSkipAndCount the
// decoder resumes from the offending sample's state without counting it.
inline DecodeResult decode_stream(const QuadSampleStream& stream,
                                  IllegalTransitionPolicy policy = IllegalTransitionPolicy::kFail) {
    DecodeResult result;
    if (stream.empty()) return result;
    result.counts.reserve(stream.size());
    result.counts.push_back({stream.front().timestamp_us, 0});
    QuadState prev = stream.front().state;
    std::int64_t count = 0;
    for (std::size_t i = 1; i < stream.size(); ++i) {
        if (stream[i].timestamp_us < stream[i - 1].timestamp_us)
            throw ValidationError("decode_stream: timestamps decrease at sample " + std::to_string(i));
        try {
            count += decode_transition(prev, stream[i].state, i);
        } catch (const IllegalTransitionError&) {
            if (policy == IllegalTransitionPolicy::kFail) throw;
            ++result.illegal_transitions;
        }
        prev = stream[i].state;
        result.counts.push_back({stream[i].timestamp_us, count});
    }
    return result;
}

// Merges two independently decoded wheel streams into one tick log on the
// union of their timestamps, carrying each wheel's last count forward. Equal
// timestamps collapse to a single entry holding the latest counts.
inline TickLog merge_decoded_counts(const DecodedCounts& left, const DecodedCounts& right) {
    TickLog log;
    log.reserve(left.size() + right.size());
    std::size_t i = 0, j = 0;
    std::int64_t lc = 0, rc = 0;
    while (i < left.size() || j < right.size()) {
        std::uint64_t t;
        if (j >= right.size()) t = left[i].timestamp_us;
        else if (i >= left.size()) t = right[j].timestamp_us;
        else t = std::min(left[i].timestamp_us, right[j].timestamp_us);
        while (i < left.size() && left[i].timestamp_us == t) lc = left[i++].count;
        while (j < right.size() && right[j].timestamp_us == t) rc = right[j++].count;
        log.push_back({t, lc, rc});
    }
    return log;
}

}  // namespace wheelodom
