#include <cstdlib>
#include <numeric>

#include "support.hpp"

using namespace enz;

TEST(Common, ErrorCarriesCodeAndName) {
  Error e(ErrorCode::BetaNearZero, "tiny");
  EXPECT_EQ(e.code(), ErrorCode::BetaNearZero);
  EXPECT_NE(std::string(e.what()).find("BETA_NEAR_ZERO"), std::string::npos);
}

TEST(Common, ExitCodesAreDistinctAndAboveUsage) {
  std::set<int> seen;
  for (int c = 0; c <= static_cast<int>(ErrorCode::ValidationError); ++c) {
    int x = exit_code(static_cast<ErrorCode>(c));
    EXPECT_GT(x, 2);
    EXPECT_TRUE(seen.insert(x).second);
  }
}

TEST(Common, CompensatedSumRecoversCancellation) {
  CompensatedSum<double> s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1000.0);
}

TEST(Common, CompensatedSumComplex) {
  CompensatedSum<Complex> s;
  s.add({1e16, -1e16});
  s.add({1.0, 2.0});
  s.add({-1e16, 1e16});
  EXPECT_EQ(s.value(), Complex(1.0, 2.0));
}

TEST(Common, ParallelForCoversEveryIndexOnce) {
  setenv("ENZ_THREADS", "3", 1);
  std::vector<int> hits(101, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  unsetenv("ENZ_THREADS");
  EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 101);
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Common, ParallelForPropagatesErrors) {
  setenv("ENZ_THREADS", "2", 1);
  EXPECT_ENZ_ERROR(parallel_for(4, [](std::size_t i) {
                     if (i == 3) fail(ErrorCode::Domain, "boom");
                   }),
                   ErrorCode::Domain);
  unsetenv("ENZ_THREADS");
}

TEST(Common, WorkerCountHonoursEnvironment) {
  setenv("ENZ_THREADS", "1", 1);
  EXPECT_EQ(worker_count(), 1u);
  setenv("ENZ_THREADS", "junk", 1);
  EXPECT_GE(worker_count(), 1u);
  unsetenv("ENZ_THREADS");
}
