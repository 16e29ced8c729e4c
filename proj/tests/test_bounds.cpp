#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cvauth/attacks.hpp"
#include "cvauth/bounds.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

cvauth::ProtocolParams params(int n, double mu_p, double mu_r) {
    cvauth::ProtocolParams p;
    p.n_states = n;
    p.mu_probe = mu_p;
    p.mu_response = mu_r;
    return p;
}

}  // namespace

TEST_CASE("holevo quantity") {
    CHECK(cvauth::holevo_chi(4, 0.0) == 0.0);
    CHECK_THAT(cvauth::holevo_chi(2, 1.0), WithinRel(0.98674743003965631, 1e-12));
    CHECK(cvauth::holevo_chi(4, 1000.0) > 0.999 * 2.0);
    CHECK(cvauth::holevo_chi(4, 1000.0) <= 2.0 + 1e-12);

    SECTION("monotone in the probe energy") {
        double prev = -1.0;
        for (double mu : {0.0, 0.5, 2.0, 10.0, 50.0}) {
            double chi = cvauth::holevo_chi(8, mu);
            CHECK(chi >= prev - 1e-12);
            prev = chi;
        }
    }
}

TEST_CASE("fano error floor") {
    CHECK(cvauth::perr_lower(2, 1.0) == 0.0);
    CHECK(cvauth::perr_lower(16, 4.0) == 0.0);
    CHECK_THAT(cvauth::perr_lower(2, 0.0), WithinAbs(0.5, 1e-12));
    CHECK_THAT(cvauth::perr_lower(2, 0.5), WithinRel(0.11002786443835955, 1e-10));
    CHECK_THAT(cvauth::perr_lower(4, 1.0), WithinRel(0.18928962491523176, 1e-10));

    SECTION("the root satisfies fano with equality") {
        for (auto [n, chi] : {std::pair{2, 0.3}, std::pair{8, 1.7}, std::pair{32, 4.2}}) {
            double p = cvauth::perr_lower(n, chi);
            double lhs = cvauth::binary_entropy(p) + p * std::log2(n - 1.0);
            CHECK_THAT(lhs, WithinAbs(std::log2(static_cast<double>(n)) - chi, 1e-10));
        }
    }
    SECTION("degenerate alphabet is rejected") {
        CHECK_THROWS_AS(cvauth::perr_lower(1, 0.0), std::invalid_argument);
    }
}

TEST_CASE("most favorable wrong-guess bin probability") {
    SECTION("a silent response hides every wrong guess") {
        auto p = params(8, 10.0, 0.0);
        auto table = cvauth::table_for(p, cvauth::ResponsePhaseMap::symmetric_default(8));
        CHECK_THAT(cvauth::p_max_in_error(p, table), WithinAbs(cvauth::p_in_honest(p), 1e-15));
    }
    SECTION("adjacent challenges are the closest pair") {
        auto p = params(8, 10.0, 5.0);
        auto table = cvauth::table_for(p, cvauth::ResponsePhaseMap::symmetric_default(8));
        double best = cvauth::p_max_in_error(p, table);
        double adjacent = cvauth::detail::p_in_pair_avg(table, 0, 1, p);
        CHECK_THAT(best, WithinAbs(adjacent, 1e-15));
        CHECK(best < cvauth::p_in_honest(p));
    }
    SECTION("brighter responses separate the pairs") {
        double prev = 2.0;
        for (double mu_r : {0.5, 2.0, 8.0, 32.0}) {
            auto p = params(8, 64.0, mu_r);
            auto table = cvauth::table_for(p, cvauth::ResponsePhaseMap::symmetric_default(8));
            double v = cvauth::p_max_in_error(p, table);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("deviation lower bound") {
    SECTION("degenerate probe carries no information") {
        auto r = cvauth::lower_bound(params(8, 0.0, 0.0));
        CHECK(r.chi == 0.0);
        CHECK(r.p_err_low > 0.8);
        CHECK(r.d_low == 0.0);
    }
    SECTION("clamping keeps the raw value") {
        auto r = cvauth::lower_bound(params(8, 0.2, 0.2));
        CHECK(r.d_low >= 0.0);
        CHECK(r.d_low >= r.d_low_raw);
        CHECK_THAT(r.d_low_raw,
                   WithinAbs(r.p_err_low * (cvauth::p_in_honest(params(8, 0.2, 0.2)) -
                                            r.p_max_in_error),
                             1e-15));
    }
    SECTION("bell shape over the alphabet size") {
        std::vector<int> grid = {2, 4, 8, 16, 32, 64, 128, 300};
        std::vector<double> vals;
        for (int n : grid) vals.push_back(cvauth::lower_bound(params(n, 600.0, 30.0)).d_low);
        std::size_t arg = 0;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (vals[i] > vals[arg]) arg = i;
        }
        CHECK(arg > 0);
        CHECK(arg + 1 < vals.size());
        CHECK(vals[arg] > 0.0);
        CHECK(vals.back() < vals[arg]);
    }
    SECTION("every attack respects the bound") {
        for (auto [n, mu_p, ratio] : {std::tuple{8, 100.0, 0.05}, std::tuple{32, 600.0, 0.05},
                                      std::tuple{64, 20.0, 0.1}}) {
            auto p = params(n, mu_p, ratio * mu_p);
            auto r = cvauth::lower_bound(p);
            for (auto a : {cvauth::Attack::kDH, cvauth::Attack::kUD, cvauth::Attack::kSR}) {
                auto stats = cvauth::attack_deviation(a, p);
                CHECK(stats.deviation >= r.d_low_raw - 1e-10);
                CHECK(stats.p_err >= r.p_err_low - 1e-10);
            }
        }
    }
}
