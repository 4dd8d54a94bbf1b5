#include <gtest/gtest.h>

#include "distreg/config.hpp"
#include "distreg/error.hpp"

using namespace distreg;

TEST(Config, Defaults) {
  const InterferenceConfig cfg = parse_config("");
  EXPECT_EQ(cfg.xi, 0.25);
  EXPECT_EQ(cfg.I, 5u);
  EXPECT_EQ(cfg.R, 5u);
  EXPECT_EQ(cfg.c, 1.5);
  EXPECT_EQ(cfg.rho_mode, RhoMode::auto_perfold);
  EXPECT_FALSE(cfg.ridge.has_value());
  EXPECT_EQ(cfg.g_convention, DetourConvention::inverted);
  EXPECT_EQ(cfg.window, (TimeWindow{0, 1439}));
}

TEST(Config, ParsesEveryKey) {
  const InterferenceConfig cfg = parse_config(
      "# comment\n"
      "kernel.family = laplace\n"
      "kernel.rho = 0.5   # trailing\n"
      "xi = 0.3\nbeta = 2\nR = 7\nc = 2.5\nridge = 1e-6\ng_convention = reversed\n"
      "seed = 99\nx5_mode = sum\ndrop_x4 = true\nsamples = 50\nkde_h = 0.1\n"
      "t_min = 300\nt_max = 1200\n");
  EXPECT_EQ(cfg.kernel_family, KernelFamily::laplace);
  EXPECT_EQ(cfg.rho_mode, RhoMode::fixed);
  EXPECT_EQ(cfg.rho, 0.5);
  EXPECT_EQ(cfg.beta, 2.0);
  EXPECT_EQ(cfg.R, 7u);
  EXPECT_EQ(*cfg.ridge, 1e-6);
  EXPECT_EQ(cfg.g_convention, DetourConvention::reversed);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.x5_mode, X5Mode::sum);
  EXPECT_TRUE(cfg.drop_x4);
  EXPECT_EQ(cfg.I, 4u);  // follows drop_x4 unless given
  EXPECT_EQ(*cfg.kde_h, 0.1);
  EXPECT_EQ(cfg.window, (TimeWindow{300, 1200}));
}

TEST(Config, RhoModes) {
  EXPECT_EQ(parse_config("kernel.rho = auto").rho_mode, RhoMode::auto_perfold);
  EXPECT_EQ(parse_config("kernel.rho = auto-global").rho_mode, RhoMode::auto_global);
  EXPECT_EQ(parse_config("kernel.rho = cv").rho_mode, RhoMode::cv);
}

TEST(Config, Rejects) {
  for (const char* text : {"xi = 0", "xi = -1", "R = 1", "c = 1", "kernel.rho = 0",
                           "kernel.rho = fast", "I = 0", "ridge = -1", "samples = 0",
                           "kde_h = 0", "t_min = 900\nt_max = 100", "x5_mode = max",
                           "drop_x4 = maybe", "seed = -3", "colour = red", "xi 0.3",
                           "g_convention = sideways", "kernel.family = cauchy"}) {
    EXPECT_THROW(parse_config(text), InvalidArgument) << text;
  }
}

TEST(Config, FormatRoundTrip) {
  const InterferenceConfig a =
      parse_config("kernel.rho = 0.1\nxi = 0.2\nridge = 0\nkde_h = 0.7\nx5_mode = sum\n");
  const InterferenceConfig b = parse_config(format_config(a));
  EXPECT_EQ(format_config(a), format_config(b));
  EXPECT_EQ(b.rho, 0.1);
  EXPECT_EQ(*b.ridge, 0.0);
  EXPECT_THROW(load_config("/nonexistent/config.txt"), InvalidArgument);
}
