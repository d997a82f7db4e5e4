"""
Exact phase-one simplex over Fractions. Finds a vertex of

    sum_j a_ij x_j <= b_i,   lower_j <= x_j <= upper_j

or proves that none exists. Entering and leaving variables follow Bland's
rule, so the method terminates without any tolerance.
"""
import logging
from fractions import Fraction

logger = logging.getLogger(__name__)


class RationalSimplex:

    def __init__(self):
        self.pivots = 0

    def find_point(self, names, rows, bounds):
        """
        :param names: variable names in column order
        :param rows: list of (coefficients dict name -> Fraction, rhs)
        :param bounds: dict name -> (lower or None, upper or None)
        :return: dict name -> Fraction, or None when the system is infeasible
        """
        # substitute x = offset + sum(sign * column) so every column is >= 0
        columns = 0
        substitution = {}
        bound_rows = []
        for name in names:
            lower, upper = bounds[name]
            if lower is not None and upper is not None and lower > upper:
                return None
            if lower is not None:
                substitution[name] = (lower, [(columns, 1)])
                if upper is not None:
                    bound_rows.append(({columns: Fraction(1)}, upper - lower))
                columns += 1
            elif upper is not None:
                substitution[name] = (upper, [(columns, -1)])
                columns += 1
            else:
                substitution[name] = (Fraction(0), [(columns, 1), (columns + 1, -1)])
                columns += 2

        standard_rows = []
        for coefficients, rhs in rows:
            row = {}
            rhs = Fraction(rhs)
            for name, a in coefficients.items():
                offset, parts = substitution[name]
                rhs -= a * offset
                for column, sign in parts:
                    row[column] = row.get(column, Fraction(0)) + sign * a
            standard_rows.append(({c: a for c, a in row.items() if a != 0}, rhs))
        standard_rows.extend(bound_rows)

        point = self._phase_one(columns, standard_rows)
        if point is None:
            return None
        assignment = {}
        for name in names:
            offset, parts = substitution[name]
            assignment[name] = offset + sum((sign * point.get(column, Fraction(0)) for column, sign in parts),
                                            Fraction(0))
        return assignment

    def _phase_one(self, columns, rows):
        m = len(rows)
        first_slack = columns
        first_artificial = columns + m
        tableau = []
        rhs = []
        basis = []
        artificial = 0
        for i, (row, b) in enumerate(rows):
            row = dict(row)
            row[first_slack + i] = Fraction(1)
            if b < 0:
                # negate the row and let an artificial variable carry it
                row = {c: -a for c, a in row.items()}
                b = -b
                column = first_artificial + artificial
                artificial += 1
                row[column] = Fraction(1)
                basis.append(column)
            else:
                basis.append(first_slack + i)
            tableau.append(row)
            rhs.append(Fraction(b))

        if artificial == 0:
            return {}

        # reduced costs of the phase-one objective sum(artificials)
        cost = {}
        value = Fraction(0)
        for row, b, basic in zip(tableau, rhs, basis):
            if basic >= first_artificial:
                value += b
                for c, a in row.items():
                    if c < first_artificial:
                        cost[c] = cost.get(c, Fraction(0)) - a
        cost = {c: d for c, d in cost.items() if d != 0}

        while value > 0:
            entering = min((c for c, d in cost.items() if d < 0), default=None)
            if entering is None:
                break
            leaving = None
            best_ratio = None
            for r, row in enumerate(tableau):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                ratio = rhs[r] / a
                if best_ratio is None or ratio < best_ratio or (ratio == best_ratio and basis[r] < basis[leaving]):
                    best_ratio, leaving = ratio, r
            if leaving is None:
                # the phase-one objective is bounded below by zero
                raise ArithmeticError("phase-one objective unbounded, tableau corrupted")
            value += cost[entering] * best_ratio
            self._pivot(tableau, rhs, basis, cost, leaving, entering, first_artificial)

        if value > 0:
            return None
        return {basic: b for basic, b in zip(basis, rhs) if basic < first_slack}

    def _pivot(self, tableau, rhs, basis, cost, r, entering, first_artificial):
        self.pivots += 1
        pivot_row = tableau[r]
        scale = pivot_row[entering]
        if scale != 1:
            pivot_row = {c: a / scale for c, a in pivot_row.items()}
            rhs[r] = rhs[r] / scale
        # artificial columns never re-enter, drop them as soon as they leave
        if basis[r] >= first_artificial:
            pivot_row.pop(basis[r], None)
        tableau[r] = pivot_row
        basis[r] = entering

        for i, row in enumerate(tableau):
            if i == r:
                continue
            factor = row.get(entering)
            if factor is None:
                continue
            for c, a in pivot_row.items():
                updated = row.get(c, Fraction(0)) - factor * a
                if updated == 0:
                    row.pop(c, None)
                else:
                    row[c] = updated
            rhs[i] -= factor * rhs[r]

        factor = cost.get(entering)
        if factor is not None:
            for c, a in pivot_row.items():
                if c >= first_artificial:
                    continue
                updated = cost.get(c, Fraction(0)) - factor * a
                if updated == 0:
                    cost.pop(c, None)
                else:
                    cost[c] = updated
