#include <vector>

#include <gtest/gtest.h>

#include "wheelodom/quadrature.hpp"

using namespace wheelodom;

namespace {

const QuadState kS00{false, false};
const QuadState kS01{false, true};
const QuadState kS10{true, false};
const QuadState kS11{true, true};

// Forward Gray cycle, one full electrical period per 4 entries.
const QuadState kForwardCycle[4] = {kS00, kS01, kS11, kS10};

QuadSampleStream forward_periods(std::size_t periods) {
    QuadSampleStream stream;
    stream.push_back({0, kS00});
    for (std::size_t k = 1; k <= periods * 4; ++k) stream.push_back({k, kForwardCycle[k % 4]});
    return stream;
}

}  // namespace

TEST(DecodeTransition, ForwardEdge) {
    EXPECT_EQ(decode_transition(kS00, kS01), 1);
}

TEST(DecodeTransition, ReverseEdge) {
    EXPECT_EQ(decode_transition(kS01, kS00), -1);
}

TEST(DecodeTransition, DoubleFlipIsIllegal) {
    EXPECT_THROW(decode_transition(kS00, kS11), IllegalTransitionError);
}

TEST(DecodeTransition, ExhaustiveTablePartition) {
    const QuadState states[4] = {kS00, kS01, kS10, kS11};
    int plus = 0, minus = 0, zero = 0, illegal = 0;
    for (const QuadState& prev : states)
        for (const QuadState& next : states) {
            try {
                switch (decode_transition(prev, next)) {
                    case 1: ++plus; break;
                    case -1: ++minus; break;
                    case 0: ++zero; break;
                    default: FAIL() << "decode_transition outside {-1,0,1}";
                }
            } catch (const IllegalTransitionError&) {
                ++illegal;
            }
        }
    EXPECT_EQ(plus, 4);
    EXPECT_EQ(minus, 4);
    EXPECT_EQ(zero, 4);
    EXPECT_EQ(illegal, 4);
}

TEST(DecodeStream, FullElectricalPeriodCountsFour) {
    const QuadSampleStream stream{{0, kS00}, {1, kS01}, {2, kS11}, {3, kS10}, {4, kS00}};
    const DecodeResult result = decode_stream(stream);
    ASSERT_EQ(result.counts.size(), 5u);
    EXPECT_EQ(result.counts.front().count, 0);
    EXPECT_EQ(result.counts.back().count, 4);
    EXPECT_EQ(result.illegal_transitions, 0u);
}

TEST(DecodeStream, FullRevolutionOf1024PprEncoderCounts4096) {
    const DecodeResult result = decode_stream(forward_periods(1024));
    EXPECT_EQ(result.counts.back().count, 4096);
}

TEST(DecodeStream, EmptyStreamYieldsNothing) {
    const DecodeResult result = decode_stream({});
    EXPECT_TRUE(result.counts.empty());
    EXPECT_EQ(result.illegal_transitions, 0u);
}

TEST(DecodeStream, CountDeltaIsAtMostOne) {
    const DecodeResult result = decode_stream(forward_periods(8));
    for (std::size_t k = 1; k < result.counts.size(); ++k) {
        const std::int64_t delta = result.counts[k].count - result.counts[k - 1].count;
        EXPECT_LE(delta, 1);
        EXPECT_GE(delta, -1);
    }
}

TEST(DecodeStream, ReversedStreamCancels) {
    QuadSampleStream stream = forward_periods(16);
    QuadSampleStream back(stream.rbegin(), stream.rend());
    std::uint64_t t = stream.back().timestamp_us;
    for (QuadSample& s : back) s.timestamp_us = t++;
    stream.insert(stream.end(), back.begin(), back.end());
    const DecodeResult result = decode_stream(stream);
    EXPECT_EQ(result.counts.back().count, 0);
    EXPECT_EQ(result.illegal_transitions, 0u);
}

TEST(DecodeStream, FailPolicyReportsSampleIndex) {
    const QuadSampleStream stream{{0, kS00}, {1, kS01}, {2, kS10}};  // 01 -> 10 double flip
    try {
        decode_stream(stream, IllegalTransitionPolicy::kFail);
        FAIL() << "expected IllegalTransitionError";
    } catch (const IllegalTransitionError& e) {
        EXPECT_EQ(e.sample_index(), 2u);
    }
}

TEST(DecodeStream, SkipPolicyResynchronizesAndCounts) {
    // 00 -> 11 is illegal; afterwards decoding continues from 11.
    const QuadSampleStream stream{{0, kS00}, {1, kS11}, {2, kS10}, {3, kS00}};
    const DecodeResult result = decode_stream(stream, IllegalTransitionPolicy::kSkipAndCount);
    EXPECT_EQ(result.illegal_transitions, 1u);
    ASSERT_EQ(result.counts.size(), 4u);
    EXPECT_EQ(result.counts[1].count, 0);   // illegal step adds nothing
    EXPECT_EQ(result.counts[2].count, 1);   // 11 -> 10 is a forward edge
    EXPECT_EQ(result.counts[3].count, 2);
}

TEST(DecodeStream, DecreasingTimestampsThrow) {
    const QuadSampleStream stream{{5, kS00}, {4, kS01}};
    EXPECT_THROW(decode_stream(stream), ValidationError);
}

TEST(MergeDecodedCounts, AlignedStreamsZip) {
    const DecodedCounts left{{0, 0}, {10, 1}, {20, 2}};
    const DecodedCounts right{{0, 0}, {10, -1}, {20, -2}};
    const TickLog log = merge_decoded_counts(left, right);
    ASSERT_EQ(log.size(), 3u);
    EXPECT_EQ(log[2].left_ticks, 2);
    EXPECT_EQ(log[2].right_ticks, -2);
}

TEST(MergeDecodedCounts, UnalignedStreamsCarryLastValue) {
    const DecodedCounts left{{0, 0}, {10, 1}};
    const DecodedCounts right{{5, 0}, {15, 3}};
    const TickLog log = merge_decoded_counts(left, right);
    ASSERT_EQ(log.size(), 4u);
    EXPECT_EQ(log[0].timestamp_us, 0u);
    EXPECT_EQ(log[1].timestamp_us, 5u);
    EXPECT_EQ(log[1].left_ticks, 0);
    EXPECT_EQ(log[2].left_ticks, 1);
    EXPECT_EQ(log[2].right_ticks, 0);
    EXPECT_EQ(log[3].right_ticks, 3);
    EXPECT_EQ(log[3].left_ticks, 1);
}

TEST(MergeDecodedCounts, DuplicateTimestampsCollapseToLatest) {
    const DecodedCounts left{{0, 0}, {10, 1}, {10, 2}};
    const DecodedCounts right{{0, 0}, {10, 5}};
    const TickLog log = merge_decoded_counts(left, right);
    ASSERT_EQ(log.size(), 2u);
    EXPECT_EQ(log[1].left_ticks, 2);
    EXPECT_EQ(log[1].right_ticks, 5);
}
