#include <iostream>

#include "isfu/isfu.hpp"

int main() {
  using namespace isfu;

  auto x = parse_program("f.incr ; f.incr ; +f.iszero ; !t ; !f");
  auto out = run(extract(x), singleton("f", Service(counter_unit(), 0)));
  std::cout << "reply=" << reply_char(out.reply) << " family=" << out.family.str()
            << '\n';

  auto succ = parse_program("+r0.iszero ; #4 ; r0.decr ; r2.incr ; \\4 ; r2.incr ; #1");
  auto univ = derived_op(rmlful(succ), univ_unit());
  for (int n = 0; n < 4; ++n)
    std::cout << "succ(" << n << ") = " << univ(n).str() << '\n';

  auto d = count_degrees(2);
  std::cout << "degrees over two states: " << d.count << '\n';
}
