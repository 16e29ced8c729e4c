#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <vector>

#include "cvauth/sweep.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

cvauth::SweepSpec spec_for(std::vector<int> grid, double mu_p, double mu_r) {
    cvauth::SweepSpec s;
    s.n_grid = std::move(grid);
    s.base.mu_probe = mu_p;
    s.base.mu_response = mu_r;
    return s;
}

}  // namespace

TEST_CASE("grid parsing") {
    CHECK(cvauth::parse_grid("2:6") == std::vector<int>{2, 3, 4, 5, 6});
    CHECK(cvauth::parse_grid("2:10:4") == std::vector<int>{2, 6, 10});
    CHECK(cvauth::parse_grid("5:5") == std::vector<int>{5});
    CHECK(cvauth::parse_grid("2,4,8") == std::vector<int>{2, 4, 8});
    CHECK(cvauth::parse_grid("7") == std::vector<int>{7});
    CHECK_THROWS_AS(cvauth::parse_grid(""), std::invalid_argument);
    CHECK_THROWS_AS(cvauth::parse_grid("2:4:1:1"), std::invalid_argument);
    CHECK_THROWS_AS(cvauth::parse_grid("4:2"), std::invalid_argument);
    CHECK_THROWS_AS(cvauth::parse_grid("2:8:0"), std::invalid_argument);
    CHECK_THROWS_AS(cvauth::parse_grid("2:8,10"), std::invalid_argument);
    CHECK_THROWS_AS(cvauth::parse_grid("abc"), std::invalid_argument);
}

TEST_CASE("sweep specification validation") {
    auto s = spec_for({2, 4, 8}, 10.0, 1.0);
    s.validate();

    SECTION("grid must be strictly increasing") {
        s.n_grid = {2, 4, 4};
        CHECK_THROWS_WITH(s.validate(), ContainsSubstring("strictly increasing"));
        s.n_grid = {4, 2};
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SECTION("grid values start at two") {
        s.n_grid = {1, 2};
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SECTION("empty grid") {
        s.n_grid.clear();
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SECTION("disabling everything is an error") {
        s.attacks.clear();
        s.include_lower_bound = false;
        CHECK_THROWS_WITH(s.validate(), ContainsSubstring("nothing to compute"));
    }
}

TEST_CASE("sweep rows agree with the per-module calculations") {
    auto s = spec_for({2}, 3.0, 1.5);
    auto rows = cvauth::run_sweep(s);
    REQUIRE(rows.size() == 1);
    const auto& row = rows.front();
    CHECK(row.n == 2);
    CHECK_THAT(row.p_in_honest, WithinRel(cvauth::p_in_honest(s.base), 1e-15));

    cvauth::ProtocolParams p = s.base;
    p.n_states = 2;
    REQUIRE(row.attack_stats[cvauth::attack_slot(cvauth::Attack::kDH)]);
    CHECK_THAT(row.attack_stats[cvauth::attack_slot(cvauth::Attack::kDH)]->p_err,
               WithinRel(cvauth::dh_perr_n2(3.0), 1e-12));
    CHECK_THAT(row.attack_stats[cvauth::attack_slot(cvauth::Attack::kUD)]->p_err,
               WithinRel(cvauth::ud_perr_n2(3.0), 1e-12));
    CHECK_THAT(row.attack_stats[cvauth::attack_slot(cvauth::Attack::kSR)]->p_err,
               WithinRel(cvauth::sr_perr_n2(3.0), 1e-9));
    for (auto a : cvauth::kAllAttacks) {
        auto direct = cvauth::attack_deviation(a, p);
        CHECK_THAT(row.attack_stats[cvauth::attack_slot(a)]->deviation,
                   WithinAbs(direct.deviation, 1e-15));
    }
    REQUIRE(row.bound);
    auto direct_bound = cvauth::lower_bound(p);
    CHECK(row.bound->chi == direct_bound.chi);
    CHECK(row.bound->d_low == direct_bound.d_low);
}

TEST_CASE("threshold extraction") {
    auto s = spec_for({2, 4, 8, 16}, 4.0, 2.0);
    auto rows = cvauth::run_sweep(s);

    SECTION("an unreachable margin reports none") {
        auto th = cvauth::thresholds(rows, 1.0);
        REQUIRE(th.size() == 3);
        for (const auto& e : th) CHECK_FALSE(e.first_n.has_value());
    }
    SECTION("a zero margin fires on the first grid point") {
        auto th = cvauth::thresholds(rows, 0.0);
        REQUIRE(th.size() == 3);
        for (const auto& e : th) {
            REQUIRE(e.first_n.has_value());
            CHECK(*e.first_n == 2);
            CHECK(e.d_at_first > 0.0);
        }
    }
    SECTION("crossing is strict") {
        double d2 = rows[0].attack_stats[cvauth::attack_slot(cvauth::Attack::kDH)]->deviation;
        auto th = cvauth::thresholds(rows, d2);
        CHECK(*th[0].first_n > 2);
    }
    SECTION("attacks excluded from the sweep are absent") {
        s.attacks = {cvauth::Attack::kSR};
        auto partial = cvauth::thresholds(cvauth::run_sweep(s), 0.0);
        REQUIRE(partial.size() == 1);
        CHECK(partial[0].attack == cvauth::Attack::kSR);
    }
}

TEST_CASE("sweep writers") {
    auto s = spec_for({2, 4}, 5.0, 1.0);
    auto rows = cvauth::run_sweep(s);

    SECTION("csv header and shape") {
        std::ostringstream out;
        cvauth::write_sweep_csv(s, rows, out);
        std::istringstream in(out.str());
        std::string header;
        std::getline(in, header);
        CHECK(header ==
              "n,p_in_honest,p_err_dh,d_dh,p_err_ud,d_ud,p_err_sr,d_sr,"
              "holevo_chi,p_err_low,p_max_in_error,d_low_raw,d_low");
        std::string line;
        int count = 0;
        while (std::getline(in, line)) {
            if (!line.empty()) ++count;
        }
        CHECK(count == 2);
        CHECK(out.str().substr(out.str().find('\n') + 1, 2) == "2,");
    }
    SECTION("attack subset drops columns") {
        cvauth::SweepSpec partial = s;
        partial.attacks = {cvauth::Attack::kDH};
        partial.include_lower_bound = false;
        std::ostringstream out;
        cvauth::write_sweep_csv(partial, cvauth::run_sweep(partial), out);
        std::string header = out.str().substr(0, out.str().find('\n'));
        CHECK(header == "n,p_in_honest,p_err_dh,d_dh");
    }
    SECTION("bound-only sweep") {
        cvauth::SweepSpec bonly = s;
        bonly.attacks.clear();
        std::ostringstream out;
        cvauth::write_sweep_csv(bonly, cvauth::run_sweep(bonly), out);
        std::string header = out.str().substr(0, out.str().find('\n'));
        CHECK(header == "n,p_in_honest,holevo_chi,p_err_low,p_max_in_error,d_low_raw,d_low");
    }
    SECTION("json envelope") {
        std::ostringstream out;
        cvauth::write_sweep_json(s, rows, out, 42);
        std::string j = out.str();
        CHECK(j.rfind("{\"kind\":\"sweep\",\"metadata\":{\"tool_version\":\"1.0.0\",\"seed\":42,",
                      0) == 0);
        CHECK_THAT(j, ContainsSubstring("\"attacks\":[\"dh\",\"ud\",\"sr\"]"));
        CHECK_THAT(j, ContainsSubstring("\"rows\":[{\"n\":2,"));
        CHECK_THAT(j, ContainsSubstring("\"gap_scale\":2.8284271247461903"));
        CHECK(j.back() == '\n');
    }
    SECTION("equal inputs give equal bytes") {
        std::ostringstream a;
        std::ostringstream b;
        cvauth::write_sweep_csv(s, rows, a);
        cvauth::write_sweep_csv(s, cvauth::run_sweep(s), b);
        CHECK(a.str() == b.str());
        std::ostringstream ja;
        std::ostringstream jb;
        cvauth::write_sweep_json(s, rows, ja);
        cvauth::write_sweep_json(s, cvauth::run_sweep(s), jb);
        CHECK(ja.str() == jb.str());
    }
}

TEST_CASE("threshold writers") {
    auto s = spec_for({2, 4, 8}, 4.0, 2.0);
    auto rows = cvauth::run_sweep(s);

    SECTION("csv sentinel for a never-crossing attack") {
        auto th = cvauth::thresholds(rows, 1.0);
        std::ostringstream out;
        cvauth::write_thresholds_csv(th, 1.0, out);
        std::istringstream in(out.str());
        std::string header;
        std::getline(in, header);
        CHECK(header == "attack,first_n,d_at_first_n,two_epsilon");
        std::string line;
        std::getline(in, line);
        CHECK(line == "dh,none,none,1");
    }
    SECTION("csv row for a crossing attack") {
        auto th = cvauth::thresholds(rows, 0.0);
        std::ostringstream out;
        cvauth::write_thresholds_csv(th, 0.0, out);
        CHECK_THAT(out.str(), ContainsSubstring("\ndh,2,"));
        CHECK_THAT(out.str(), ContainsSubstring("\nsr,2,"));
    }
    SECTION("json nulls for a never-crossing attack") {
        auto th = cvauth::thresholds(rows, 1.0);
        std::ostringstream out;
        cvauth::write_thresholds_json(th, 1.0, out, s.base, 7);
        std::string j = out.str();
        CHECK(j.rfind("{\"kind\":\"threshold\",\"metadata\":{\"tool_version\":\"1.0.0\",\"seed\":7,",
                      0) == 0);
        CHECK_THAT(j, ContainsSubstring("\"two_epsilon\":1"));
        CHECK_THAT(j, ContainsSubstring(
                           "{\"attack\":\"dh\",\"first_n\":null,\"d_at_first_n\":null}"));
    }
}
