"""A local deterministic model for any state and POVMs, with setting-dependent weights.

Run: python3 demos/general_model.py
"""

from bellsep.catalog import qudit_scenario, singlet_scenario
from bellsep.general_model import build_general_brans, check_properties, verify_reproduction
from bellsep.info_measures import cmd_report, general_dimension_bound

for name, (rho, povms) in {
    "singlet, 8x8 spin directions": singlet_scenario(8)[:2],
    "two qutrits, 3x3 random bases": qudit_scenario(3, 3),
}.items():
    model = build_general_brans(rho, povms)
    rep = verify_reproduction(model, model.implied_table())
    props = check_properties(model)
    bound = cmd_report(model).upper_bound
    ceiling = general_dimension_bound(povms.d1, povms.d2)
    print(name)
    print(f"  hidden variables: {len(model.lambda_domain)}, settings: {len(model.settings)}")
    print(f"  reproduction error {rep.max_abs_error:.1e}")
    print(f"  outcome independence {props.outcome_independence}, parameter independence {props.parameter_independence}, "
          f"measurement independence {props.measurement_independence}")
    print(f"  capacity bound on this grid {bound:.4f} bits (ceiling {ceiling:.4f})")
