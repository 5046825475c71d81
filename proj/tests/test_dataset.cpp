#include <gtest/gtest.h>

#include "evbreak/dataset.hpp"

namespace evbreak {
namespace {

TEST(Dataset, DropsMissingRowsAndKeepsOrder) {
  const std::string text =
      "year,flow,level\n"
      "1950,10.5,3\n"
      "1951,NA,4\n"
      "1952,12,\n"
      "\n"
      "1953,9.25,2.5\n";
  DatasetOptions opt;
  opt.index_column = "year";
  const auto ds = read_dataset(text, opt);
  EXPECT_EQ(ds.rows_read, 4u);
  EXPECT_EQ(ds.rows_dropped, 2u);
  ASSERT_EQ(ds.sample.n(), 2u);
  EXPECT_EQ(ds.sample(0, 0), 10.5);
  EXPECT_EQ(ds.sample(1, 1), 2.5);
  EXPECT_EQ(ds.sample.labels(), (std::vector<std::string>{"1950", "1953"}));
  EXPECT_EQ(ds.column_names, (std::vector<std::string>{"flow", "level"}));
}

TEST(Dataset, ColumnSelectionDelimiterAndMissingToken) {
  const std::string text = "a;b;c\n1;2;3\n4;-;6\n7;8;9\n";
  DatasetOptions opt;
  opt.delimiter = ';';
  opt.missing = "-";
  opt.columns = {"c", "a"};
  const auto ds = read_dataset(text, opt);
  ASSERT_EQ(ds.sample.n(), 3u);
  EXPECT_EQ(ds.sample(0, 0), 3.0);
  EXPECT_EQ(ds.sample(0, 1), 1.0);
  EXPECT_EQ(ds.rows_dropped, 0u);
}

TEST(Dataset, Errors) {
  EXPECT_THROW(read_dataset(""), DataError);
  EXPECT_THROW(read_dataset("a\n1\n"), DataError);
  EXPECT_THROW(read_dataset("a,b\n1,x\n"), DataError);
  EXPECT_THROW(read_dataset("a,b\n1,2,3\n"), DataError);
  DatasetOptions opt;
  opt.columns = {"a", "zzz"};
  EXPECT_THROW(read_dataset("a,b\n1,2\n", opt), DataError);
  EXPECT_THROW(load_dataset("/nonexistent.csv"), DataError);
  try {
    read_dataset("a,b\n1,2\n3,oops\n");
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Dataset, QuotedHeaderAndCrlf) {
  const auto ds = read_dataset("\"x\",\"y\"\r\n1,2\r\n3,4\r\n");
  EXPECT_EQ(ds.column_names, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(ds.sample(1, 1), 4.0);
}

}  // namespace
}  // namespace evbreak
