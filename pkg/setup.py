from setuptools import setup, find_packages

setup(
    name='fblearn',
    version='0.1-dev',
    description='Finite-blocklength bounds for channel codes learned from samples.',

    packages=find_packages(exclude=['build*', 'tests*']),
    python_requires='>=3.7',
    install_requires=[
        'numpy>=1.17',
        'scipy>=1.4',
    ],

    license='BSD-3',

    entry_points={'console_scripts': '''
        fblearn = fblearn.cli:main
    '''},

    classifiers=[
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Information Analysis',
    ],

)
