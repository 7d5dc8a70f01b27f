#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>

#include "polywave/oracle.hpp"

using namespace polywave;
using oracle::Rational;

namespace {

BasicSubsetVector<Rational> random_rational_state(int n, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    BasicSubsetVector<Rational> f(n);
    Rational sum = 0;
    for (auto& x : f.coeffs) {
        x = Rational(int(eng() % 64), 64);
        sum += x;
    }
    if (sum == 0) {
        f.coeffs[0] += 1;
        sum += 1;
    }
    for (auto& x : f.coeffs) x /= sum;
    return f;
}

} // namespace

TEST(DenseHamiltonian, TwoSiteSectorOneBlock) {
    const Lattice lat = build_lattice({2});
    const auto h = oracle::build_hamiltonian_dense(lat);
    // sector-1 basis masks are 0b01, 0b10
    EXPECT_EQ(h.at(0b01, 0b01), 1.0);
    EXPECT_EQ(h.at(0b01, 0b10), -1.0);
    EXPECT_EQ(h.at(0b10, 0b01), -1.0);
    EXPECT_EQ(h.at(0b10, 0b10), 1.0);
    // the empty and full subsets are untouched
    EXPECT_EQ(h.at(0b00, 0b00), 0.0);
    EXPECT_EQ(h.at(0b11, 0b11), 0.0);
}

TEST(DenseHamiltonian, AnnihilatesConstantSectorVectors) {
    const Lattice lat = build_lattice({2, 2});
    const auto h = oracle::build_hamiltonian_dense(lat);
    for (int n = 0; n <= 4; ++n) {
        const SubsetVector ones = sector_embed(
            SectorVector{4, n, std::vector<double>(binomial(4, n), 1.0)});
        EXPECT_LE(linf_norm(oracle::apply(h, ones.coeffs)), 0.0) << "sector " << n;
    }
}

TEST(DenseHamiltonian, IsPositiveSemidefiniteAtSixSites) {
    const Lattice lat = build_lattice({3, 2});
    const auto h = oracle::build_hamiltonian_dense(lat);
    Eigen::MatrixXd M(h.rows, h.cols);
    for (int r = 0; r < h.rows; ++r)
        for (int c = 0; c < h.cols; ++c) M(r, c) = h.at(r, c);
    EXPECT_LE((M - M.transpose()).cwiseAbs().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
}

TEST(DenseHamiltonian, EnforcesSizeCap) {
    const Lattice lat = build_lattice({13});
    EXPECT_THROW(oracle::build_hamiltonian_dense(lat), SizeError);
}

TEST(EnumeratePartitions, CountsMatchBellNumbers) {
    EXPECT_EQ(oracle::enumerate_partitions(0b11u).size(), 2u);
    EXPECT_EQ(oracle::enumerate_partitions(0b1111u).size(), 15u);
    EXPECT_EQ(oracle::enumerate_partitions(0b11111111u).size(),
              count_partitions(0b11111111u));
}

TEST(EnumeratePartitions, BlocksPartitionTheSetAndAppearOnce) {
    const SubsetId s = 0b101101u;
    std::set<std::vector<SubsetId>> seen;
    for (const auto& p : oracle::enumerate_partitions(s)) {
        SubsetId acc = 0;
        for (SubsetId b : p.blocks) {
            EXPECT_NE(b, 0u);
            EXPECT_EQ(acc & b, 0u);   // disjoint
            acc |= b;
        }
        EXPECT_EQ(acc, s);            // exhaustive
        auto sorted = p.blocks;
        std::sort(sorted.begin(), sorted.end());
        EXPECT_TRUE(seen.insert(sorted).second) << "duplicate partition";
    }
    EXPECT_EQ(seen.size(), count_partitions(s));
}

TEST(EnumeratePartitions, ProperFilterDropsExactlyTheSingleBlock) {
    const SubsetId s = 0b1111u;
    std::size_t proper = 0, improper = 0;
    for (const auto& p : oracle::enumerate_partitions(s))
        (p.proper() ? proper : improper)++;
    EXPECT_EQ(improper, 1u);
    EXPECT_EQ(proper, count_partitions(s) - 1);
}

TEST(EnumeratePartitions, EnforcesSizeCap) {
    EXPECT_THROW(oracle::for_each_partition((SubsetId(1) << 11) - 1, [](const auto&) {}),
                 SizeError);
}

TEST(DenseT, IdentityAndZeroCases) {
    const auto id = oracle::dense_T(4, 2, 2);
    for (int r = 0; r < id.rows; ++r)
        for (int c = 0; c < id.cols; ++c)
            EXPECT_EQ(id.at(r, c), r == c ? 1.0 : 0.0);
    const auto zero = oracle::dense_T(4, 1, 3);
    for (double x : zero.a) EXPECT_EQ(x, 0.0);
}

TEST(RationalMiniMode, ZetaMobiusRoundtripIsExact) {
    const auto f = random_rational_state(5, 2);
    const auto back = oracle::naive_superset_mobius(oracle::naive_superset_zeta(f));
    EXPECT_EQ(back.coeffs, f.coeffs);
}

TEST(RationalMiniMode, PolymerRoundtripIsExact) {
    for (int n : {2, 4, 6}) {
        const auto f = random_rational_state(n, 10 + n);
        const auto c = oracle::naive_superset_zeta(f);
        ASSERT_EQ(c.coeffs[0], Rational(1));
        const auto w = oracle::naive_solve_u(c);
        const auto back = oracle::naive_reconstruct_f(n, w);
        EXPECT_EQ(back.coeffs, f.coeffs) << "n=" << n;
    }
}

TEST(RationalMiniMode, ProductStateHasExactlyZeroPolymers) {
    // independent sites with rational occupations: every multi-site weight
    // cancels identically, not merely to rounding
    const int n = 4;
    const std::vector<Rational> p{{1, 3}, {2, 5}, {3, 4}, {1, 7}};
    BasicSubsetVector<Rational> f(n);
    for (std::size_t m = 0; m < f.size(); ++m) {
        Rational val = 1;
        for (int i = 0; i < n; ++i)
            val *= (m >> i) & 1u ? p[i] : Rational(1) - p[i];
        f.coeffs[m] = val;
    }
    const auto w = oracle::naive_solve_u(oracle::naive_superset_zeta(f));
    for (SubsetId s = 0; s < SubsetId(f.size()); ++s) {
        if (cardinality(s) >= 2) {
            EXPECT_EQ(w[s], Rational(0));
        }
        if (cardinality(s) == 1) {
            EXPECT_EQ(w[s], p[std::countr_zero(s)]);
        }
    }
}
