"""Juntas, their pivot decomposition and multilinear expansion."""
import numpy as np

from mrfjunta.junta import Junta, decompose, junta_polynomial
from mrfjunta.polynomial import cube

maj = Junta.from_function(8, (2, 5, 7), lambda a, b, c: int(a + b + c >= 2))
print(maj)
print("f(x2=1, x5=0, x7=1) =", maj.evaluate(np.array([0, 0, 1, 0, 0, 0, 0, 1])))

# f = x_i g(x_-i) + h(x_-i); g vanishes exactly when x_i is irrelevant
for i in (2, 3):
    d = decompose(maj, i)
    print(f"pivot {i}: g table {d.g.tolist()}, g == 0: {d.g_is_zero}")

d = decompose(maj, 5)
x = cube(8)
assert np.array_equal(x[:, 5] * d.g_values(x) + d.h_values(x), maj.cube_values())

xor = Junta.from_function(2, (0, 1), lambda a, b: a ^ b)
print("XOR expansion:", junta_polynomial(xor))
print("majority expansion:", junta_polynomial(maj))
