from setuptools import setup

setup(name='urforcing',
      version='0.1.0',
      packages=['urforcing'],
      description='Desk-scale laboratory for forcing with urelements: finite posets, names, forcing relations and verification suites',
      license='MIT',
      python_requires='>=3.9',
      install_requires=[
            'numpy',
            'joblib',
            'tqdm',
      ],
      extras_require={
            'test': ['pytest', 'hypothesis'],
      },
      entry_points={
            'console_scripts': ['urforcing=urforcing.cli:main'],
      },
)
