#include <sstream>

#include <gtest/gtest.h>

#include "handmotion/config.hpp"
#include "handmotion/errors.hpp"

namespace handmotion {
namespace {

TEST(KeyValueConfig, SectionsPrefixKeys) {
  std::istringstream in(
      "seed = 4\n# comment\n[tcn]\nchannels = 128\ndilations = 1, 2, 4\n"
      "[train]\nregime = cross\nfull = yes\n");
  const auto cfg = KeyValueConfig::parse(in);
  EXPECT_EQ(cfg.get_int("seed", 0), 4);
  EXPECT_EQ(cfg.get_int("tcn.channels", 0), 128);
  EXPECT_EQ(cfg.get_doubles("tcn.dilations", {}),
            (std::vector<double>{1, 2, 4}));
  EXPECT_EQ(cfg.get_string("train.regime", ""), "cross");
  EXPECT_TRUE(cfg.get_bool("train.full", false));
  EXPECT_EQ(cfg.get_double("train.lr", 0.5), 0.5);
}

TEST(KeyValueConfig, BadValuesThrow) {
  std::istringstream in("[a]\nn = 3x\nb = maybe\n");
  const auto cfg = KeyValueConfig::parse(in);
  EXPECT_THROW(cfg.get_int("a.n", 0), ParseError);
  EXPECT_THROW(cfg.get_bool("a.b", false), ParseError);
}

TEST(KeyValueConfig, MalformedLineThrows) {
  std::istringstream in("[a]\njust words\n");
  EXPECT_THROW(KeyValueConfig::parse(in), ParseError);
}

TEST(KeyValueConfig, UnreadKeysListed) {
  std::istringstream in("[a]\nx = 1\ny = 2\n");
  const auto cfg = KeyValueConfig::parse(in);
  cfg.get_int("a.x", 0);
  EXPECT_EQ(cfg.unread_keys(), (std::vector<std::string>{"a.y"}));
}

TEST(KeyValueConfig, WriteParsesBack) {
  KeyValueConfig cfg;
  cfg.set("seed", "1");
  cfg.set("tcn.channels", "64");
  cfg.set("augment.speed_min", "0.7");
  std::stringstream buf;
  cfg.write(buf);
  const auto back = KeyValueConfig::parse(buf);
  EXPECT_EQ(back.entries(), cfg.entries());
}

}  // namespace
}  // namespace handmotion
