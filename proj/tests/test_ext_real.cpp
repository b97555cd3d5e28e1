#include "doctest.h"
#include "potkit/ext_real.hpp"

using potkit::ExtReal;

TEST_CASE("infinities absorb finite values") {
  CHECK((ExtReal(3.0) + ExtReal::neg_inf()).is_neg_inf());
  CHECK((ExtReal::pos_inf() - ExtReal(1e300)).is_pos_inf());
  CHECK((ExtReal::pos_inf() + ExtReal::neg_inf()).indeterminate_value());
}

TEST_CASE("zero times infinity is zero") {
  ExtReal z = 0.0 * ExtReal::neg_inf();
  CHECK(z.finite());
  CHECK(z.value() == 0.0);
  CHECK((-2.0 * ExtReal::neg_inf()).is_pos_inf());
}

TEST_CASE("ordering") {
  CHECK(ExtReal::neg_inf() < ExtReal(-1e308));
  CHECK(ExtReal(2.0) < ExtReal::pos_inf());
  CHECK_FALSE(ExtReal::indeterminate() <= ExtReal(0.0));
  CHECK_FALSE(ExtReal::indeterminate() >= ExtReal(0.0));
  CHECK(max(ExtReal::neg_inf(), ExtReal(1.0)) == ExtReal(1.0));
  CHECK(min(ExtReal::neg_inf(), ExtReal(1.0)).is_neg_inf());
}

TEST_CASE("ieee round trip") {
  CHECK(ExtReal(-INFINITY).is_neg_inf());
  CHECK(ExtReal(NAN).indeterminate_value());
  CHECK(std::isinf(ExtReal::pos_inf().to_double()));
  CHECK_THROWS(ExtReal::neg_inf().value());
}
