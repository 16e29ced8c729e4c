/*
 * Monte Carlo session simulator. A session draws M challenges and quadrature
 * angles, produces homodyne outcomes (honest device or intercept-resend
 * adversary), counts in-bin outcomes, and applies the accept rule.
 *
 * Randomness is split into one stream per (session, query, role); the
 * challenge and angle streams never depend on the adversary model, so runs
 * under the same seed see identical challenge sequences across models. Per
 * query the draw order is fixed: challenge, angle, adversary guess, outcome.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cvauth/attacks.hpp"
#include "cvauth/math.hpp"
#include "cvauth/model.hpp"
#include "cvauth/rng.hpp"
#include "cvauth/verifier.hpp"

namespace cvauth {

// ── session configuration ────────────────────────────────────────────────────

enum class AdversaryModel {
    kHonest,      // device answers with the enrolled response
    kConfusion,   // guess sampled from the attack's confusion matrix
    kPhysicalDH,  // dual-homodyne outcome simulated and quantized to a guess
};

inline const char* adversary_model_name(AdversaryModel m) {
    switch (m) {
        case AdversaryModel::kHonest: return "honest";
        case AdversaryModel::kConfusion: return "confusion";
        case AdversaryModel::kPhysicalDH: return "physical-dh";
    }
    throw std::logic_error("adversary_model_name: unknown model");
}

struct SessionConfig {
    ProtocolParams params;
    std::uint64_t seed = 0;
    std::uint64_t session_index = 0;
    AdversaryModel model = AdversaryModel::kHonest;
    Attack attack = Attack::kDH;  // consulted when model == kConfusion
    // When set, overrides the attack's analytic confusion matrix in
    // kConfusion mode (e.g. an identity matrix for paired-seed checks).
    std::optional<ConfusionMatrix> custom_confusion;
    bool keep_queries = false;    // retain per-query records in the result

    void validate() const {
        params.validate();
        if (model == AdversaryModel::kPhysicalDH && attack != Attack::kDH) {
            throw std::invalid_argument("session: physical-dh mode requires the dh attack");
        }
        if (custom_confusion && custom_confusion->n != params.n_states) {
            throw std::invalid_argument("session: custom confusion size mismatch");
        }
    }
};

struct QueryRecord {
    int k = 0;
    int theta_idx = 0;
    int k_tilde = 0;      // equals k for the honest device
    double outcome = 0.0;
    bool in_bin = false;
};

struct SessionResult {
    std::uint64_t n_queries = 0;
    std::uint64_t n_in = 0;
    double p_in_hat = 0.0;
    bool accepted = false;
    std::vector<QueryRecord> queries;

    bool operator==(const SessionResult& o) const {
        return n_queries == o.n_queries && n_in == o.n_in && p_in_hat == o.p_in_hat &&
               accepted == o.accepted;
    }
};

// Phase sector the dual-homodyne outcome (x, y) falls into.
inline int sample_dh_guess(double x, double y, int n) {
    if (n < 1) throw std::invalid_argument("sample_dh_guess: n must be >= 1");
    double angle = std::atan2(y, x);
    long long idx = std::llround(n * angle / (2.0 * kPi));
    idx %= n;
    if (idx < 0) idx += n;
    return static_cast<int>(idx);
}

namespace detail {

inline int sample_from_row(const ConfusionMatrix& c, int k, double u) {
    double cum = 0.0;
    for (int kt = 0; kt < c.n; ++kt) {
        cum += c.p(kt, k);
        if (u < cum) return kt;
    }
    return c.n - 1;
}

struct Challenge {
    int k = 0;
    int theta_idx = 0;
};

inline Challenge draw_challenge(std::uint64_t skey, std::uint64_t q, int n) {
    Challenge ch;
    CounterRng cs = query_stream(skey, q, StreamTag::kChallenge);
    ch.k = static_cast<int>(cs.next_below(static_cast<std::uint64_t>(n)));
    CounterRng ts = query_stream(skey, q, StreamTag::kTheta);
    ch.theta_idx = static_cast<int>(ts.next_below(2));
    return ch;
}

// Adversary guess and homodyne outcome for one already-drawn challenge. The
// adversary stream is only consumed by adversarial models.
inline QueryRecord finish_query(const SessionConfig& cfg, const CRPTable& table,
                                const ConfusionMatrix* confusion, std::uint64_t skey,
                                std::uint64_t q, Challenge ch) {
    const ProtocolParams& p = cfg.params;
    QueryRecord rec;
    rec.k = ch.k;
    rec.theta_idx = ch.theta_idx;
    rec.k_tilde = ch.k;
    if (cfg.model == AdversaryModel::kConfusion) {
        CounterRng adv = query_stream(skey, q, StreamTag::kAdversary);
        rec.k_tilde = sample_from_row(*confusion, rec.k, adv.next_unit());
    } else if (cfg.model == AdversaryModel::kPhysicalDH) {
        CounterRng adv = query_stream(skey, q, StreamTag::kAdversary);
        double amp = std::sqrt(2.0 * p.mu_probe);
        double phase = 2.0 * kPi * rec.k / p.n_states;
        double x = amp * std::cos(phase) + adv.next_normal();
        double y = amp * std::sin(phase) + adv.next_normal();
        rec.k_tilde = sample_dh_guess(x, y, p.n_states);
    }

    double center = table.mean(rec.k, rec.theta_idx);
    double mean = center;
    if (rec.k_tilde != rec.k) {
        mean = center + (table.mean(rec.k_tilde, rec.theta_idx) - center) / p.gap_scale;
    }
    CounterRng out = query_stream(skey, q, StreamTag::kOutcome);
    rec.outcome = mean + p.sigma() * out.next_normal();
    rec.in_bin = std::abs(rec.outcome - center) < 0.5 * p.delta();
    return rec;
}

inline std::optional<ConfusionMatrix> session_confusion(const SessionConfig& cfg) {
    if (cfg.model != AdversaryModel::kConfusion) return std::nullopt;
    if (cfg.custom_confusion) {
        cfg.custom_confusion->validate();
        return cfg.custom_confusion;
    }
    return confusion_for(cfg.attack, cfg.params.n_states, cfg.params.mu_probe);
}

}  // namespace detail

// ── session runner ───────────────────────────────────────────────────────────

inline SessionResult run_session(const SessionConfig& cfg, const CRPTable& table) {
    cfg.validate();
    table.validate();
    if (table.n_states != cfg.params.n_states) {
        throw std::invalid_argument("run_session: table size does not match n_states");
    }
    std::optional<ConfusionMatrix> confusion = detail::session_confusion(cfg);
    std::uint64_t skey = session_key(cfg.seed, cfg.session_index);
    SessionResult res;
    res.n_queries = cfg.params.n_queries;
    if (cfg.keep_queries) res.queries.reserve(cfg.params.n_queries);
    for (std::uint64_t q = 0; q < cfg.params.n_queries; ++q) {
        detail::Challenge ch = detail::draw_challenge(skey, q, cfg.params.n_states);
        QueryRecord rec =
            detail::finish_query(cfg, table, confusion ? &*confusion : nullptr, skey, q, ch);
        if (rec.in_bin) ++res.n_in;
        if (cfg.keep_queries) res.queries.push_back(rec);
    }
    res.p_in_hat = static_cast<double>(res.n_in) / static_cast<double>(res.n_queries);
    res.accepted = accept(res.p_in_hat, cfg.params);
    return res;
}

inline SessionResult run_session(const SessionConfig& cfg) {
    return run_session(cfg,
                       table_for(cfg.params, ResponsePhaseMap::symmetric_default(cfg.params.n_states)));
}

// ── protocol messages and actor harness ──────────────────────────────────────

enum class MessageKind { kChallengeBatch, kQuadratureOutcome, kVerdict };

struct ProtocolMessage {
    MessageKind kind = MessageKind::kQuadratureOutcome;
    // challenge batch
    std::string table_id;
    std::vector<std::pair<int, int>> challenges;  // (k, theta index) per query
    // outcome
    std::uint64_t query_index = 0;
    double value = 0.0;
    // verdict
    bool accepted = false;
};

// One message per line: a challenge batch as
// "challenge-batch,<table_id>,<M>,<k>:<theta_idx>,...", outcomes as
// "outcome,<j>,<value>", the verdict as "verdict,<0|1>".
inline void write_transcript(const std::vector<ProtocolMessage>& transcript, std::ostream& out) {
    for (const ProtocolMessage& m : transcript) {
        switch (m.kind) {
            case MessageKind::kChallengeBatch:
                out << "challenge-batch," << m.table_id << ',' << m.challenges.size();
                for (const auto& [k, t] : m.challenges) out << ',' << k << ':' << t;
                out << '\n';
                break;
            case MessageKind::kQuadratureOutcome:
                out << "outcome," << m.query_index << ',' << detail::format_g17(m.value) << '\n';
                break;
            case MessageKind::kVerdict:
                out << "verdict," << (m.accepted ? 1 : 0) << '\n';
                break;
        }
    }
}

// Message channel between the server and device actors; enforces the
// protocol order (one challenge batch, then M outcomes in query order, then
// one verdict) and records the transcript.
class SessionChannel {
public:
    explicit SessionChannel(std::uint64_t n_queries) : expected_(n_queries) {}

    void post_challenge_batch(ProtocolMessage msg) {
        if (phase_ != Phase::kAwaitChallenges) {
            throw std::logic_error("protocol order violated: challenge batch out of order");
        }
        if (msg.challenges.size() != expected_) {
            throw std::logic_error("protocol order violated: challenge batch size mismatch");
        }
        messages_.push_back(std::move(msg));
        phase_ = expected_ > 0 ? Phase::kAwaitOutcomes : Phase::kAwaitVerdict;
    }

    void post_outcome(std::uint64_t query_idx, double outcome) {
        if (phase_ != Phase::kAwaitOutcomes) {
            throw std::logic_error("protocol order violated: outcome before challenge batch");
        }
        if (query_idx != seen_) {
            throw std::logic_error("protocol order violated: outcome for wrong query");
        }
        ProtocolMessage m;
        m.kind = MessageKind::kQuadratureOutcome;
        m.query_index = query_idx;
        m.value = outcome;
        messages_.push_back(std::move(m));
        if (++seen_ == expected_) phase_ = Phase::kAwaitVerdict;
    }

    void post_verdict(bool accepted) {
        if (phase_ != Phase::kAwaitVerdict) {
            throw std::logic_error("protocol order violated: verdict before all outcomes");
        }
        ProtocolMessage m;
        m.kind = MessageKind::kVerdict;
        m.accepted = accepted;
        messages_.push_back(std::move(m));
        phase_ = Phase::kDone;
    }

    bool done() const { return phase_ == Phase::kDone; }
    const std::vector<ProtocolMessage>& messages() const { return messages_; }
    std::vector<ProtocolMessage> take_messages() { return std::move(messages_); }

private:
    enum class Phase { kAwaitChallenges, kAwaitOutcomes, kAwaitVerdict, kDone };
    Phase phase_ = Phase::kAwaitChallenges;
    std::uint64_t expected_ = 0;
    std::uint64_t seen_ = 0;
    std::vector<ProtocolMessage> messages_;
};

struct HarnessResult {
    SessionResult session;
    std::vector<ProtocolMessage> transcript;
};

// Actor-structured replay of run_session: the server announces the challenge
// batch, the device (honest or with the adversary in line) posts one outcome
// per query, the server posts the verdict. Bit-equal to run_session under the
// same configuration because both use the same per-query streams.
inline HarnessResult run_actor_harness(const SessionConfig& cfg, const CRPTable& table) {
    cfg.validate();
    table.validate();
    if (table.n_states != cfg.params.n_states) {
        throw std::invalid_argument("run_actor_harness: table size does not match n_states");
    }
    std::optional<ConfusionMatrix> confusion = detail::session_confusion(cfg);
    std::uint64_t skey = session_key(cfg.seed, cfg.session_index);
    SessionChannel channel(cfg.params.n_queries);

    std::vector<detail::Challenge> batch;
    batch.reserve(cfg.params.n_queries);
    ProtocolMessage head;
    head.kind = MessageKind::kChallengeBatch;
    head.table_id = table.table_id;
    head.challenges.reserve(cfg.params.n_queries);
    for (std::uint64_t q = 0; q < cfg.params.n_queries; ++q) {
        detail::Challenge ch = detail::draw_challenge(skey, q, cfg.params.n_states);
        batch.push_back(ch);
        head.challenges.emplace_back(ch.k, ch.theta_idx);
    }
    channel.post_challenge_batch(std::move(head));

    SessionResult res;
    res.n_queries = cfg.params.n_queries;
    if (cfg.keep_queries) res.queries.reserve(cfg.params.n_queries);
    for (std::uint64_t q = 0; q < cfg.params.n_queries; ++q) {
        QueryRecord rec = detail::finish_query(cfg, table, confusion ? &*confusion : nullptr, skey,
                                               q, batch[static_cast<std::size_t>(q)]);
        channel.post_outcome(q, rec.outcome);
        if (rec.in_bin) ++res.n_in;
        if (cfg.keep_queries) res.queries.push_back(rec);
    }
    res.p_in_hat = static_cast<double>(res.n_in) / static_cast<double>(res.n_queries);
    res.accepted = accept(res.p_in_hat, cfg.params);
    channel.post_verdict(res.accepted);
    if (!channel.done()) throw std::logic_error("protocol order violated: session left unfinished");
    return {std::move(res), channel.take_messages()};
}

inline HarnessResult run_actor_harness(const SessionConfig& cfg) {
    return run_actor_harness(
        cfg, table_for(cfg.params, ResponsePhaseMap::symmetric_default(cfg.params.n_states)));
}

// ── empirical confusion ──────────────────────────────────────────────────────

// Guess frequencies from repeated single-probe attacks, samples_per_challenge
// trials for each k. The DH attack is simulated physically (Gaussian outcome,
// sector quantization); UD and SR sample their analytic rows, which is what
// the measurement postulate prescribes for those POVMs.
inline ConfusionMatrix estimate_confusion(Attack attack, const ProtocolParams& params,
                                          std::uint64_t samples_per_challenge,
                                          std::uint64_t seed) {
    params.validate();
    if (samples_per_challenge < 10000) {
        throw std::invalid_argument("estimate_confusion: need at least 10^4 samples");
    }
    int n = params.n_states;
    std::optional<ConfusionMatrix> analytic;
    if (attack != Attack::kDH) analytic = confusion_for(attack, n, params.mu_probe);

    ConfusionMatrix c;
    c.n = n;
    c.circulant = false;
    c.data.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    double amp = std::sqrt(2.0 * params.mu_probe);
    for (int k = 0; k < n; ++k) {
        CounterRng rng(derive_key(seed, static_cast<std::uint64_t>(k)));
        for (std::uint64_t s = 0; s < samples_per_challenge; ++s) {
            int kt;
            if (attack == Attack::kDH) {
                double phase = 2.0 * kPi * k / n;
                double x = amp * std::cos(phase) + rng.next_normal();
                double y = amp * std::sin(phase) + rng.next_normal();
                kt = sample_dh_guess(x, y, n);
            } else {
                kt = detail::sample_from_row(*analytic, k, rng.next_unit());
            }
            c.data[static_cast<std::size_t>(k) * static_cast<std::size_t>(n) +
                   static_cast<std::size_t>(kt)] += 1.0;
        }
    }
    for (double& v : c.data) v /= static_cast<double>(samples_per_challenge);
    return c;
}

}  // namespace cvauth
