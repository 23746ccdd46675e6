#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bsdb/mask.hpp"
#include "oracles.hpp"

using bsdb::BinaryMask;

namespace {

BinaryMask mask_from(int rows, int cols,
                     std::initializer_list<std::pair<int, int>> fg) {
  BinaryMask mask(rows, cols);
  for (const auto& [r, c] : fg) mask.at(r, c) = 1;
  return mask;
}

} // namespace

TEST_CASE("dfs fuse", "[mask-ops]") {
  SECTION("no gray roots, no output") {
    BinaryMask gray(4, 4);
    BinaryMask rgb(4, 4);
    rgb.at(1, 1) = 1;
    rgb.at(2, 2) = 1;
    REQUIRE(bsdb::dfs_fuse(gray, rgb).count() == 0);
  }

  SECTION("all foreground stays all foreground") {
    BinaryMask all(3, 5);
    for (auto& b : all.bits) b = 1;
    REQUIRE(bsdb::dfs_fuse(all, all) == all);
  }

  SECTION("worked 4x4 example") {
    const BinaryMask gray = mask_from(4, 4, {{1, 1}});
    const BinaryMask rgb =
        mask_from(4, 4, {{0, 1}, {1, 1}, {1, 2}, {2, 2}, {3, 0}});
    const BinaryMask expected =
        mask_from(4, 4, {{0, 1}, {1, 1}, {1, 2}, {2, 2}});
    const BinaryMask fused = bsdb::dfs_fuse(gray, rgb);
    REQUIRE(fused == expected);
    REQUIRE(fused.at(3, 0) == 0); // disconnected rgb island stays out
  }

  SECTION("isolated root is kept even without rgb support") {
    const BinaryMask gray = mask_from(5, 5, {{2, 2}});
    const BinaryMask rgb(5, 5);
    const BinaryMask fused = bsdb::dfs_fuse(gray, rgb);
    REQUIRE(fused.count() == 1);
    REQUIRE(fused.at(2, 2) == 1);
  }

  SECTION("rgb component adjacent to a root floods even if the root itself "
          "is not an rgb pixel") {
    const BinaryMask gray = mask_from(3, 4, {{0, 0}});
    const BinaryMask rgb = mask_from(3, 4, {{0, 1}, {0, 2}, {1, 2}});
    const BinaryMask fused = bsdb::dfs_fuse(gray, rgb);
    REQUIRE(fused == mask_from(3, 4, {{0, 0}, {0, 1}, {0, 2}, {1, 2}}));
  }

  SECTION("dimension mismatch") {
    REQUIRE_THROWS_AS(bsdb::dfs_fuse(BinaryMask(3, 3), BinaryMask(3, 4)),
                      bsdb::ShapeError);
  }

  SECTION("equals the flood-fill oracle with shuffled root order") {
    std::mt19937 rng(404);
    for (int trial = 0; trial < 300; ++trial) {
      const BinaryMask gray = oracle::random_mask(rng, 32, 32, 0.08);
      const BinaryMask rgb = oracle::random_mask(rng, 32, 32, 0.35);
      const BinaryMask fused = bsdb::dfs_fuse(gray, rgb);
      REQUIRE(fused == oracle::flood_fuse(gray, rgb, &rng));
    }
  }

  SECTION("handles a full-frame 4096x4096 mask without overflowing") {
    BinaryMask all(4096, 4096);
    for (auto& b : all.bits) b = 1;
    BinaryMask gray(4096, 4096);
    gray.at(0, 0) = 1;
    const BinaryMask fused = bsdb::dfs_fuse(gray, all);
    REQUIRE(fused.count() == all.bits.size());
  }
}

TEST_CASE("speckle removal", "[mask-ops]") {
  SECTION("single isolated pixel removed") {
    const BinaryMask mask = mask_from(5, 5, {{2, 2}});
    REQUIRE(bsdb::speckle_removal(mask).count() == 0);
  }

  SECTION("8-pixel component kept, 7-pixel removed") {
    BinaryMask eight(4, 8);
    for (int c = 0; c < 8; ++c) eight.at(1, c) = 1;
    REQUIRE(bsdb::speckle_removal(eight) == eight);

    BinaryMask seven(4, 8);
    for (int c = 0; c < 7; ++c) seven.at(1, c) = 1;
    REQUIRE(bsdb::speckle_removal(seven).count() == 0);
  }

  SECTION("diagonal contact is not 4-connectivity") {
    // Two 5-pixel plus-shaped blobs touching only diagonally.
    BinaryMask mask(8, 8);
    auto plus = [&](int r, int c) {
      mask.at(r, c) = 1;
      mask.at(r - 1, c) = 1;
      mask.at(r + 1, c) = 1;
      mask.at(r, c - 1) = 1;
      mask.at(r, c + 1) = 1;
    };
    plus(2, 2);
    plus(4, 4); // (3,3) stays empty; closest contact is diagonal
    REQUIRE(mask.count() == 10);
    REQUIRE(bsdb::speckle_removal(mask, 8).count() == 0);
  }

  SECTION("idempotent and equal to the component oracle") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 100; ++trial) {
      const BinaryMask mask = oracle::random_mask(rng, 24, 24, 0.4);
      const BinaryMask once = bsdb::speckle_removal(mask, 8);
      REQUIRE(once == oracle::remove_small_components(mask, 8));
      REQUIRE(bsdb::speckle_removal(once, 8) == once);
    }
  }
}

TEST_CASE("mask metrics", "[mask-ops]") {
  SECTION("identical masks score 1") {
    std::mt19937 rng(5);
    const BinaryMask mask = oracle::random_mask(rng, 10, 10, 0.3);
    const auto m = bsdb::mask_metrics(mask, mask);
    REQUIRE(m.iou == 1.0);
    REQUIRE(m.precision == 1.0);
    REQUIRE(m.recall == 1.0);
  }

  SECTION("disjoint non-empty masks score 0 iou") {
    const BinaryMask a = mask_from(3, 3, {{0, 0}});
    const BinaryMask b = mask_from(3, 3, {{2, 2}});
    REQUIRE(bsdb::mask_metrics(a, b).iou == 0.0);
  }

  SECTION("half-covering subset") {
    BinaryMask truth(2, 4);
    for (auto& b : truth.bits) b = 1;
    BinaryMask pred(2, 4);
    for (int c = 0; c < 4; ++c) pred.at(0, c) = 1;
    const auto m = bsdb::mask_metrics(pred, truth);
    REQUIRE(m.recall == 0.5);
    REQUIRE(m.precision == 1.0);
    REQUIRE(m.iou == 0.5);
  }

  SECTION("empty vs empty counts as a perfect match") {
    const auto m = bsdb::mask_metrics(BinaryMask(4, 4), BinaryMask(4, 4));
    REQUIRE(m.iou == 1.0);
  }

  SECTION("dimension mismatch") {
    REQUIRE_THROWS_AS(bsdb::mask_metrics(BinaryMask(2, 2), BinaryMask(3, 3)),
                      bsdb::ShapeError);
  }
}

TEST_CASE("mask or", "[mask-ops]") {
  std::mt19937 rng(6);
  const BinaryMask a = oracle::random_mask(rng, 12, 9, 0.4);
  const BinaryMask b = oracle::random_mask(rng, 12, 9, 0.4);
  const BinaryMask c = oracle::random_mask(rng, 12, 9, 0.4);
  const BinaryMask empty(12, 9);

  REQUIRE(bsdb::mask_or(a, empty) == a);
  REQUIRE(bsdb::mask_or(a, a) == a);
  REQUIRE(bsdb::mask_or(a, b) == bsdb::mask_or(b, a));
  REQUIRE(bsdb::mask_or(bsdb::mask_or(a, b), c) ==
          bsdb::mask_or(a, bsdb::mask_or(b, c)));

  BinaryMask expected(12, 9);
  for (std::size_t i = 0; i < expected.bits.size(); ++i)
    expected.bits[i] = a.bits[i] || b.bits[i];
  REQUIRE(bsdb::mask_or(a, b) == expected);
}
