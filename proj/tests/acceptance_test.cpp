#include <gtest/gtest.h>
TEST(StubAcc, Ok){SUCCEED();}
