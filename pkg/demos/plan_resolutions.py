"""Pick converter resolutions from a rate-loss budget.

Runs the DAC-side planner against a range of budgets (6-bit ADCs, load
1/8), audits each plan by evaluating the high-SNR loss it actually
achieves, then shows the ADC-side planner and how the plans move with
the user load.
"""

from qmimo import (
    SystemConfig,
    high_snr_loss_dac,
    plan_adc_bits,
    plan_dac_bits,
    rate_loss_dac,
)

ADC_BITS, LOAD = 6, 0.125

print(f"DAC planning at {ADC_BITS}-bit ADCs, load {LOAD:g}")
print("budget   planned  loss (planner's law)  loss (table rho)  loss at 30 dB")
for budget in (6.0, 4.0, 2.0, 1.0, 0.5):
    planned = plan_dac_bits(ADC_BITS, budget, LOAD)
    cfg = SystemConfig.with_snr(8, 1, 1000.0, dac_bits=planned, adc_bits=ADC_BITS)
    print(f"{budget:6.1f}   {planned:7d}  {high_snr_loss_dac(planned, ADC_BITS, LOAD, 'approx'):20.4f}"
          f"  {high_snr_loss_dac(planned, ADC_BITS, LOAD):16.4f}"
          f"  {rate_loss_dac(cfg):13.4f}")

# The planner inverts the high-resolution distortion law, so its own
# loss column stays inside the budget by construction; the table-rho
# column is the sharper audit, and the 30 dB column shows the finite-SNR
# loss sitting below the limit.

print()
print("ADC planning at 6-bit DACs")
print("budget   load 1/4   load 1/8   load 1/16   load 1/64")
for budget in (2.0, 1.0, 0.5):
    row = [plan_adc_bits(6, budget, load) for load in (0.25, 0.125, 0.0625, 1 / 64)]
    print(f"{budget:6.1f}   " + "   ".join(f"{bits:8d}" for bits in row))
print()
print("Lighter load means more array gain for the ADC distortion to eat,"
      " so the planned ADC resolution climbs as the load drops.")
