#include <map>

#include "semialg/errors.h"
#include "semialg/program.h"

namespace semialg {

namespace {

struct Entry {
  const char* source;
  const char* tmpl;
};

// The Dubins programs loop under z1 <= 0 and exit when z1 >= 0.
const std::map<std::string, Entry, std::less<>>& entries() {
  static const std::map<std::string, Entry, std::less<>> kEntries = {
      {"overview",
       {R"(vars x y in [-100,100] x [-100,100];
pre: x^2 + y^2 <= 1;
branch (x^2 + y^2 <= 3) {
  x := x*x + y - 1;
  y := x*y + y + 1;
}
post: x^2 - 2*y^2 <= 4;
)",
        "x^2 + a*y^2 + b"}},
      {"example22",
       {R"(vars x y in [-100,100] x [-100,100];
pre: x^2 + y^2 <= 4;
branch (x <= 4) {
  x := x + 0.25*y*y + 1;
  y := 0.5*y;
}
post: x <= 7;
)",
        "y^2 + x + a - 6"}},
      {"dubins",
       {R"(vars z1 z2 in [-100,100] x [-100,100];
pre: z1^2 + (z2 - 1)^2 - 1 <= 0;
branch (z1 <= 0) {
  par {
    z1 := z1 + 0.01*(1 - z2*(1.0178 + 1.8721*z1 - 0.0253*z2));
    z2 := z2 + 0.01*(z1*(1.0178 + 1.8721*z1 - 0.0253*z2));
  }
}
post: z1^2 + (z2 - 1)^2 - 4 <= 0;
)",
        "z1^2 + a*z2^2 + b*z2 + c"}},
      {"dubins_disturbed",
       {R"(vars z1 z2 in [-100,100] x [-100,100];
dist r in [-0.01,0.01];
pre: z1^2 + (z2 - 1)^2 - 1 <= 0;
branch (z1 <= 0) {
  par {
    z1 := z1 + 0.01*(1 - z2*(1.0178 + 1.8721*z1 - 0.0253*z2 + r*z2));
    z2 := z2 + 0.01*(z1*(1.0178 + 1.8721*z1 - 0.0253*z2 + r*z2));
  }
}
post: z1^2 + (z2 - 1)^2 - 4 <= 0;
)",
        "z1^2 + a*z2^2 + b*z2 + c"}},
      {"L1",
       {R"(vars x y in [-100,100] x [-100,100];
pre: x^2 + y^2 <= 1;
branch (*) {
  x := x*x + y - 1;
  y := x*y + y + 1;
}
post: x^2 - 2*y^2 <= 4;
)",
        "x^2 + a*y^2 + b"}},
      {"L2",
       {R"(vars x y in [-100,100] x [-100,100];
pre: x^2 + y^2 <= 1;
branch (x <= 0) {
  par {
    x := x - 1/2*x + 1/2*y*y;
    y := y - 1/2*x*y;
  }
}
branch (x > 0) {
  par {
    x := x - 1/2*x - 1/2*y*y;
    y := y - 1/2*x*y;
  }
}
exit: *;
post: -x^2 - y^2 + 3*x - 2 <= 0;
)",
        "x^2 + y^2 + a*x + b"}},
      {"L3",
       {R"(vars x y in [-100,100] x [-100,100];
pre: x^2 + y^2 <= 1;
branch (*) {
  par {
    x := x + 1/8*(x - 4*y - x*x*x - x*y*y);
    y := y + 1/8*(4*x + y - x*x*y - y*y*y);
  }
}
post: x + y^2 - 3 <= 0;
)",
        "x^2 + y^2 + a"}},
      {"L4",
       {R"(vars x y in [-100,100] x [-100,100];
pre: x^2 + y^2 <= 1;
branch (*) {
  par {
    x := x + 1/64*(-3*x + x^2 + y^2 - 5*x^3);
    y := y + 1/64*(-3*y + 2*x*y - 5*y^3);
  }
}
post: -2*x + y^2 - 5 <= 0;
)",
        "x^2 + y^2 + a"}},
      {"L5",
       {R"(vars x y in [-100,100] x [-100,100];
pre: x^2 + y^2 <= 1;
branch (*) {
  par {
    x := x + 0.1*y;
    y := y + 0.1*(-x + 1/3*x*x*x - y);
  }
}
post: x^2 - 2*y^2 - 4 <= 0;
)",
        "x^2 + a*x*y + b*y^2 + c"}},
      {"L6",
       {R"(vars x y z in [-100,100] x [-100,100] x [-100,100];
pre: x^2 + y^2 <= 1;
branch (*) {
  par {
    x := x + 0.1*10.0*(y - x);
    y := y + 0.1*(x*(28.0 - z) - y);
    z := z + 0.1*(x*y - 8/3*z);
  }
}
post: x^2 - 2*y^2 - 4 <= 0;
)",
        "x^2 + a*y^2 + b"}},
  };
  return kEntries;
}

const Entry& lookup(std::string_view name) {
  auto it = entries().find(name);
  if (it == entries().end()) {
    throw UsageError("unknown corpus program '" + std::string(name) + "'");
  }
  return it->second;
}

}  // namespace

std::vector<std::string> corpus_names() {
  return {"overview", "example22", "dubins", "dubins_disturbed", "L1", "L2", "L3",
          "L4",       "L5",        "L6"};
}

std::string corpus_source(std::string_view name) { return lookup(name).source; }

std::pair<GuardedLoop, TemplateSpec> corpus(std::string_view name) {
  const Entry& e = lookup(name);
  GuardedLoop loop = parse_program(e.source);
  TemplateSpec tmpl = parse_template(e.tmpl, loop);
  return {std::move(loop), std::move(tmpl)};
}

}  // namespace semialg
