# Config package: JSON run configurations, experiment presets and run plans
