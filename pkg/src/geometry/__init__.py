"""Surface catalogue and the Gaussian area functional."""
