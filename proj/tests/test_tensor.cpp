#include <doctest.h>

#include "ctcnn/ctt.hpp"
#include "ctcnn/error.hpp"
#include "ctcnn/tensor.hpp"
#include "oracles.hpp"

using namespace ctcnn;

TEST_CASE("tensor construction enforces the shape invariants") {
  CHECK(Tensor({2, 3}).size() == 6);
  CHECK_THROWS_AS(Tensor(Shape{}), DimensionError);
  CHECK_THROWS_AS(Tensor({1, 1, 1, 1, 1}), DimensionError);
  CHECK_THROWS_AS(Tensor({2, 0}), DimensionError);
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0f, 2.0f, 3.0f}), DimensionError);
  CHECK_THROWS_AS(Tensor({2, 2}).reshaped({3}), DimensionError);
}

TEST_CASE("matmul examples") {
  const Tensor a({2, 2}, {1, 2, 3, 4});
  const Tensor b({2, 2}, {5, 6, 7, 8});
  const Tensor eye({2, 2}, {1, 0, 0, 1});
  CHECK(matmul(eye, b) == b);
  CHECK(matmul(a, eye) == a);
  CHECK(matmul(a, b) == Tensor({2, 2}, {19, 22, 43, 50}));
}

TEST_CASE("matmul reports both shapes on mismatch") {
  try {
    matmul(Tensor({2, 3}), Tensor({2, 3}));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2,3]") != std::string::npos);
  }
  CHECK_THROWS_AS(matmul(Tensor({4}), Tensor({4, 1})), DimensionError);
}

TEST_CASE("matmul matches the naive triple loop bit for bit") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(7), k = 1 + rng.below(7), n = 1 + rng.below(7);
    const auto a = oracle::random_tensor<float>({m, k}, rng);
    const auto b = oracle::random_tensor<float>({k, n}, rng);
    CHECK(matmul(a, b) == oracle::naive_matmul(a, b));

    Tensor eye_k({k, k}), eye_m({m, m});
    for (std::size_t i = 0; i < k; ++i) eye_k[i * k + i] = 1;
    for (std::size_t i = 0; i < m; ++i) eye_m[i * m + i] = 1;
    CHECK(matmul(a, eye_k) == a);
    CHECK(matmul(eye_m, a) == a);
  }
}

TEST_CASE("im2col of a single 3x3 patch is the flattened input") {
  Tensor x({3, 3, 1});
  for (std::size_t i = 0; i < 9; ++i) x[i] = static_cast<float>(i + 1);
  const Tensor cols = im2col(x);
  CHECK(cols.shape() == Shape{1, 9});
  CHECK(cols.values() == x.values());
}

TEST_CASE("im2col of a 4x4 input enumerates four overlapping patches") {
  Tensor x({4, 4, 1});
  for (std::size_t i = 0; i < 16; ++i) x[i] = static_cast<float>(i);
  const Tensor cols = im2col(x);
  CHECK(cols.shape() == Shape{4, 9});
  CHECK(cols == oracle::enumerate_patches(x));
  // Top-left patch, then the one shifted right.
  CHECK(std::vector<float>(cols.values().begin(), cols.values().begin() + 9) ==
        std::vector<float>{0, 1, 2, 4, 5, 6, 8, 9, 10});
  CHECK(cols.at(1, 0) == 1.0f);
}

TEST_CASE("im2col matches patch enumeration for multi-channel inputs") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::random_tensor<double>({3 + rng.below(6), 3 + rng.below(6), 1 + rng.below(4)}, rng);
    CHECK(im2col(x) == oracle::enumerate_patches(x));
  }
}

TEST_CASE("im2col rejects inputs smaller than the kernel") {
  CHECK_THROWS_AS(im2col(Tensor({2, 5, 1})), DimensionError);
  CHECK_THROWS_AS(im2col(Tensor({5, 2, 1})), DimensionError);
  CHECK_THROWS_AS(im2col(Tensor({5, 5})), DimensionError);
}

TEST_CASE("col2im is the adjoint of im2col") {
  // <im2col(x), y> == <x, col2im(y)> for all x, y.
  Rng rng(9);
  const auto x = oracle::random_tensor<double>({5, 6, 2}, rng);
  const auto y = oracle::random_tensor<double>({12, 18}, rng);
  const auto cx = im2col(x);
  const auto ay = col2im(y, 5, 6, 2);
  double lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < cx.size(); ++i) lhs += cx[i] * y[i];
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * ay[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("im2col + matmul convolution equals the direct loop") {
  Rng rng(3);
  const auto x = oracle::random_tensor<float>({6, 6, 2}, rng);
  const auto w = oracle::random_tensor<float>({3, 3, 2, 3}, rng);
  const Tensor zero_bias({3});
  const Tensor lowered = matmul(im2col(x), w.reshaped({18, 3})).reshaped({4, 4, 3});
  CHECK(oracle::max_abs_diff(lowered, oracle::direct_conv3x3(x, w, zero_bias)) <= 1e-5);
}

TEST_CASE("argmax examples") {
  CHECK(argmax(Tensor({4}, {0.1f, 0.7f, 0.1f, 0.1f})) == 1);
  CHECK(argmax(Tensor({4}, {0.25f, 0.25f, 0.25f, 0.25f})) == 0);
  CHECK(argmax(Tensor({1}, {-1.0f})) == 0);
  CHECK_THROWS_AS(argmax(Tensor()), DimensionError);
}

TEST_CASE("argmax is invariant under a constant shift") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto v = oracle::random_tensor<double>({1 + rng.below(10)}, rng);
    const std::size_t before = argmax(v);
    const double shift = rng.uniform(-50, 50);
    for (double& x : v.data()) x += shift;
    // Shifts can merge values that differ in the last bit; only assert when the
    // winner is still strictly ahead.
    bool unique = true;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (i != before && v[i] == v[before]) unique = false;
    if (unique) CHECK(argmax(v) == before);
  }
}

TEST_CASE("CTT1 encoding layout") {
  const Tensor t({1, 2}, {1.0f, -2.0f});
  const auto bytes = encode_ctt(t);
  const std::vector<std::uint8_t> expected = {'C', 'T', 'T', '1', 2, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0,
                                              0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0xc0};
  CHECK(bytes == expected);
}

TEST_CASE("CTT1 round trip preserves shape and bits") {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    Shape shape;
    const std::size_t rank = 1 + rng.below(4);
    for (std::size_t i = 0; i < rank; ++i) shape.push_back(1 + rng.below(5));
    const auto t = oracle::random_tensor<float>(shape, rng, -1e6, 1e6);
    CHECK(decode_ctt(encode_ctt(t)) == t);
  }
}

TEST_CASE("CTT1 decoding failures carry byte offsets") {
  auto bytes = encode_ctt(Tensor({2, 2}, {1, 2, 3, 4}));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_ctt(bad_magic), FormatError);

  auto truncated = bytes;
  truncated.resize(truncated.size() - 1);
  try {
    decode_ctt(truncated);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 16);
  }

  auto bad_rank = bytes;
  bad_rank[4] = 5;
  try {
    decode_ctt(bad_rank);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 4);
  }

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_ctt(trailing), FormatError);
}

TEST_CASE("CTT1 files round trip through disk") {
  oracle::TempDir dir("ctt");
  const Tensor t({2, 3, 1}, {0, 1, 2, 3, 4, 5});
  write_ctt(dir / "t.ctt", t);
  CHECK(read_ctt(dir / "t.ctt") == t);
  CHECK_THROWS_AS(read_ctt(dir / "missing.ctt"), FilesystemError);
}
