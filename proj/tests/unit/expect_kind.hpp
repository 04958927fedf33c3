#pragma once

#include <gtest/gtest.h>

#include "cqrl/errors.hpp"

#define EXPECT_KIND(stmt, expected_kind)                                                   \
  do {                                                                                     \
    try {                                                                                  \
      stmt;                                                                                \
      ADD_FAILURE() << "no exception from " #stmt;                                         \
    } catch (const ::cqrl::Error& e) {                                                     \
      EXPECT_EQ(e.kind(), expected_kind) << e.what();                                      \
    }                                                                                      \
  } while (0)
